import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import GPT2Config, GPT2Model, PreTrainedTokenizerFast


def build_byte_tokenizer(with_bos: bool = True) -> PreTrainedTokenizerFast:
    """Byte-level tokenizer with full coverage and no learned merges.

    Every string tokenizes to one token per UTF-8 byte, so any emoji is
    representable; tone modifiers all cost 4 tokens (tone-uniform).
    """
    alphabet = pre_tokenizers.ByteLevel.alphabet()
    vocab = {"<s>": 0}
    for index, char in enumerate(sorted(alphabet)):
        vocab[char] = index + 1
    tokenizer = Tokenizer(models.BPE(vocab=vocab, merges=[]))
    tokenizer.pre_tokenizer = pre_tokenizers.ByteLevel(
        add_prefix_space=False, use_regex=False
    )
    if with_bos:
        tokenizer.post_processor = processors.TemplateProcessing(
            single="<s> $A", special_tokens=[("<s>", 0)]
        )
    wrapped = PreTrainedTokenizerFast(tokenizer_object=tokenizer, bos_token="<s>")
    wrapped.name_or_path = "byte-level-test"
    return wrapped


def build_tiny_model(hidden_size: int = 16) -> GPT2Model:
    torch.manual_seed(0)
    config = GPT2Config(
        vocab_size=257,
        n_positions=256,
        n_embd=hidden_size,
        n_layer=1,
        n_head=2,
        bos_token_id=0,
        eos_token_id=0,
    )
    return GPT2Model(config).eval()


@pytest.fixture(scope="session")
def tokenizer():
    return build_byte_tokenizer()


@pytest.fixture(scope="session")
def model():
    return build_tiny_model()

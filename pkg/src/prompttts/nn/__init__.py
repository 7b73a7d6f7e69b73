"""Shared neural building blocks and the checkpoint format."""
from prompttts.nn.blocks import (
    DeepPrefix,
    FeedForward,
    SelfAttention,
    TransformerBlock,
    TransformerStack,
    lengths_to_mask,
    prepend_style,
    sinusoid_table,
)
from prompttts.nn.checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "DeepPrefix",
    "FeedForward",
    "SelfAttention",
    "TransformerBlock",
    "TransformerStack",
    "lengths_to_mask",
    "prepend_style",
    "sinusoid_table",
    "load_checkpoint",
    "save_checkpoint",
]

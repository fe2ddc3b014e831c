"""Attention-weight and integrated-gradient scorers over an encoder model.

Both scorers share the same plumbing: run a BERT-style encoder with a fast
tokenizer, produce one raw score per model token, then recombine subword
pieces into whole-word scores and drop special tokens. Scores are emitted
for every word occurrence; stopword zeroing happens downstream in the
budget-conversion stage, never here.
"""

from __future__ import annotations

import torch

from .align import align_token_scores
from .records import DEFAULT_INVERT, ScoreRecord


class ModelBundle:
    """An encoder plus its (fast) tokenizer, loaded once and reused."""

    def __init__(self, model, tokenizer, max_length: int = 512):
        if not getattr(tokenizer, "is_fast", False):
            raise ValueError("a fast tokenizer is required (offset mappings)")
        self.model = model.eval()
        self.tokenizer = tokenizer
        self.max_length = max_length

    @classmethod
    def from_pretrained(cls, name_or_path: str) -> "ModelBundle":
        from transformers import AutoModel, AutoTokenizer

        return cls(
            # eager attention so attention weights can be returned
            AutoModel.from_pretrained(name_or_path, attn_implementation="eager"),
            AutoTokenizer.from_pretrained(name_or_path, use_fast=True),
        )

    def encode(self, text: str):
        return self.tokenizer(
            text,
            return_tensors="pt",
            return_offsets_mapping=True,
            truncation=True,
            max_length=self.max_length,
        )


def attention_scores(text: str, bundle: ModelBundle, doc_id: str) -> ScoreRecord:
    """Per-word scores from attention weights.

    Attentions are averaged over heads, then layers, then over the query
    dimension, leaving one "attention received" scalar per model token.
    """
    enc = bundle.encode(text)
    offsets = enc.pop("offset_mapping")[0].tolist()
    if not offsets:
        return ScoreRecord(doc_id, "attention", DEFAULT_INVERT["attention"], [])
    with torch.no_grad():
        out = bundle.model(**enc, output_attentions=True)
    # layers x [1, heads, T, T] -> [T, T] -> scalar per key token
    stacked = torch.stack(out.attentions).mean(dim=2).mean(dim=0)[0]
    per_token = stacked.mean(dim=0)
    return ScoreRecord(
        doc_id=doc_id,
        method="attention",
        invert=DEFAULT_INVERT["attention"],
        scores=align_token_scores(text, per_token.tolist(), offsets),
    )


def ig_scores(
    text: str, bundle: ModelBundle, doc_id: str, steps: int = 16
) -> ScoreRecord:
    """Per-word scores from integrated gradients on the input embeddings.

    The forward target is the sum of the mean-pooled final hidden state; the
    baseline is the all-zero embedding. Each token's attribution vector is
    reduced with the L2 norm.
    """
    enc = bundle.encode(text)
    offsets = enc.pop("offset_mapping")[0].tolist()
    if not offsets:
        return ScoreRecord(doc_id, "ig", DEFAULT_INVERT["ig"], [])
    embed_layer = bundle.model.get_input_embeddings()
    inputs = embed_layer(enc["input_ids"])
    attention_mask = enc["attention_mask"]
    baseline = torch.zeros_like(inputs)

    def forward(embeds: torch.Tensor) -> torch.Tensor:
        hidden = bundle.model(
            inputs_embeds=embeds, attention_mask=attention_mask
        ).last_hidden_state
        return hidden.mean(dim=1).sum()

    # Riemann midpoint approximation of the path integral of gradients
    total = torch.zeros_like(inputs)
    for step in range(steps):
        alpha = (step + 0.5) / steps
        point = (baseline + alpha * (inputs - baseline)).detach().requires_grad_(True)
        forward(point).backward()
        total += point.grad
    attributions = (inputs - baseline) * (total / steps)
    per_token = attributions[0].norm(dim=-1)
    return ScoreRecord(
        doc_id=doc_id,
        method="ig",
        invert=DEFAULT_INVERT["ig"],
        scores=align_token_scores(text, per_token.tolist(), offsets),
    )

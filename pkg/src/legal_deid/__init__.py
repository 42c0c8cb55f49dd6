"""Person-name de-identification for legal texts, plus span and coreference evaluation."""

from legal_deid.text_model import Document, Sentence, Span, Token, contains, slice_text

__version__ = "0.1.0"

__all__ = ["Document", "Sentence", "Span", "Token", "contains", "slice_text"]

"""morphedit: joint spelling correction and morphological annotation of
dialectal Arabic text, with annotation management, suggestion
precomputation, and inter-annotator agreement evaluation."""

from .model import (
    Analysis,
    AnnotationRecord,
    DocStatus,
    Document,
    EditKind,
    EditLog,
    EditOp,
    MorphAnnotation,
    Provenance,
    Role,
    Segment,
    Sentence,
    Source,
    TagSet,
    Token,
    User,
    default_tagset,
    load_tagset,
    validate_annotation,
)

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "AnnotationRecord",
    "DocStatus",
    "Document",
    "EditKind",
    "EditLog",
    "EditOp",
    "MorphAnnotation",
    "Provenance",
    "Role",
    "Segment",
    "Sentence",
    "Source",
    "TagSet",
    "Token",
    "User",
    "default_tagset",
    "load_tagset",
    "validate_annotation",
    "__version__",
]

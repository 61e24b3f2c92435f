"""CIU extraction, spatio-semantic graphs and ANCOVA for picture-description transcripts."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .chat import SourceFormat, Transcript, Utterance, parse_chat, parse_plain, strip_chat_markup
from .features import FEATURE_NAMES, FeatureVector, compute_features, features_csv, read_features_csv
from .graph import QuadrantGraph, SpatioSemanticGraph, build_graph, build_quadrant_graph, render_svg, to_dot
from .lexicon import CiuId, CiuMatch, CiuSequence, Lexicon, extract_cius, load_lexicon, load_lexicon_file
from .normalize import LemmaRules, Token, lemmatize, normalize
from .pipeline import Resources, RunConfig, process_file, process_text
from .spatial import CoordinateTable, Quadrant, distance, load_coordinates, load_coordinates_file, quadrant_of
from .special import betainc, f_sf
from .stats import AncovaResult, CohortRecord, Group, ancova_feature, ancova_table, ols_fit
from .synth import SynthSpec, generate_cohort

__all__ = [
    "BACKEND", "SourceFormat", "Transcript", "Utterance", "parse_chat", "parse_plain", "strip_chat_markup",
    "FEATURE_NAMES", "FeatureVector", "compute_features", "features_csv", "read_features_csv",
    "QuadrantGraph", "SpatioSemanticGraph", "build_graph", "build_quadrant_graph", "render_svg", "to_dot",
    "CiuId", "CiuMatch", "CiuSequence", "Lexicon", "extract_cius", "load_lexicon", "load_lexicon_file",
    "LemmaRules", "Token", "lemmatize", "normalize", "Resources", "RunConfig", "process_file", "process_text",
    "CoordinateTable", "Quadrant", "distance", "load_coordinates", "load_coordinates_file", "quadrant_of",
    "betainc", "f_sf", "AncovaResult", "CohortRecord", "Group", "ancova_feature", "ancova_table", "ols_fit",
    "SynthSpec", "generate_cohort",
]

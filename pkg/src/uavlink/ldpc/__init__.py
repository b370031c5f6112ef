"""CRC, segmentation, QC-LDPC coding, and rate matching."""

from .codec import (
    FILLER_LLR,
    RV_SEQUENCE,
    LdpcConfig,
    desegment_tb,
    ldpc_decode,
    ldpc_encode,
    make_ldpc_config,
    parity_ok,
    rate_match,
    rate_recover,
    rv_start,
    segment_tb,
    select_base_graph,
)
from .crc import crc_attach, crc_check, crc_remainder
from .tables import ALL_LIFTING_SIZES, LIFTING_SETS, get_base_graph, lifting_set_index

__all__ = [
    "FILLER_LLR", "RV_SEQUENCE", "LdpcConfig", "desegment_tb", "ldpc_decode",
    "ldpc_encode", "make_ldpc_config", "parity_ok", "rate_match",
    "rate_recover", "rv_start", "segment_tb", "select_base_graph",
    "crc_attach", "crc_check", "crc_remainder",
    "ALL_LIFTING_SIZES", "LIFTING_SETS", "get_base_graph", "lifting_set_index",
]

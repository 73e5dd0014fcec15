"""
Configuration settings for the finite-field code toolkit.
Values come from the environment (or a local .env file) with desk-scale defaults.
"""
import os
import logging
from dotenv import load_dotenv
from typing import List

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    return int(raw.strip().replace('_', ''))


class Config:
    """Toolkit configuration."""

    DEBUG = os.getenv('DEBUG', 'False').lower() == 'true'

    # Logging
    LOG_LEVEL = logging.DEBUG if DEBUG else getattr(
        logging, os.getenv('LOG_LEVEL', 'INFO').upper(), logging.INFO
    )
    LOG_FORMAT = os.getenv('LOG_FORMAT', 'console' if DEBUG else 'json')  # 'console' or 'json'

    # Enumeration limits
    ENUMERATION_CAP = _env_int('ENUMERATION_CAP', 10**7)      # max q^t codewords/combinations
    ENUMERATION_CHUNK = _env_int('ENUMERATION_CHUNK', 2**16)  # messages per vectorized block
    NSC_MAX_K = _env_int('NSC_MAX_K', 16)                     # largest k accepted by is_nsc

    # Fields
    FIELD_MAX_ORDER = _env_int('FIELD_MAX_ORDER', 2**16)      # largest supported q
    DLOG_TABLE_MAX = _env_int('DLOG_TABLE_MAX', 2**12)        # build discrete-log tables up to this q

    # Searches
    SEARCH_ATTEMPTS = _env_int('SEARCH_ATTEMPTS', 2000)       # randomized λ-search budget
    DEFAULT_SEED = _env_int('DEFAULT_SEED', 0)

    # Parallelism
    WORKERS = _env_int('WORKERS', 1)                          # threads for enumeration chunks


def validate_config() -> List[str]:
    """
    Validate configuration at startup.
    Returns list of warning messages (empty if all OK).
    """
    warnings = []

    if Config.ENUMERATION_CAP < 1:
        warnings.append("ENUMERATION_CAP must be at least 1 - every enumeration will be refused")
    if Config.ENUMERATION_CHUNK < 1:
        warnings.append("ENUMERATION_CHUNK must be at least 1 - falling back to 1")
    if Config.WORKERS < 1:
        warnings.append("WORKERS must be at least 1 - running single-threaded")
    if Config.NSC_MAX_K > 20:
        warnings.append(f"NSC_MAX_K={Config.NSC_MAX_K} makes is_nsc exponentially slow")
    if Config.FIELD_MAX_ORDER > 2**16:
        warnings.append("FIELD_MAX_ORDER above 2^16 is outside the tested range")
    if Config.DLOG_TABLE_MAX > Config.FIELD_MAX_ORDER:
        warnings.append("DLOG_TABLE_MAX exceeds FIELD_MAX_ORDER and has no effect")
    if Config.SEARCH_ATTEMPTS < 1:
        warnings.append("SEARCH_ATTEMPTS must be at least 1 - randomized search disabled")
    if Config.LOG_FORMAT not in ('console', 'json'):
        warnings.append(f"Unknown LOG_FORMAT '{Config.LOG_FORMAT}' - using json")

    return warnings

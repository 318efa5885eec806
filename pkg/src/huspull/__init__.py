"""High-utility sequential pattern mining with utility-linked lists."""

from .miner import Bound, MinerConfig, MiningStats, MiningTimeout, mine
from .model import (
    SCALE,
    HUSPResult,
    ParseError,
    Pattern,
    ProfitTable,
    QItem,
    QSeqDatabase,
    QSequence,
    find_matches,
    format_fixed,
    load_database,
    naive_pattern_utility,
    parse_database,
    parse_profit_table,
    parse_results,
    render_results,
    to_fixed,
)
from .oracle import BudgetExceeded, enumerate_patterns, oracle_mine

__all__ = [
    "SCALE",
    "Bound",
    "BudgetExceeded",
    "HUSPResult",
    "MinerConfig",
    "MiningStats",
    "MiningTimeout",
    "ParseError",
    "Pattern",
    "ProfitTable",
    "QItem",
    "QSeqDatabase",
    "QSequence",
    "enumerate_patterns",
    "find_matches",
    "format_fixed",
    "load_database",
    "mine",
    "naive_pattern_utility",
    "oracle_mine",
    "parse_database",
    "parse_profit_table",
    "parse_results",
    "render_results",
    "to_fixed",
]

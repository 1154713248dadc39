from psytrain.exams.service import (
    DEFAULT_WEIGHTS,
    ExamAlert,
    ExamOrder,
    Finding,
    OrderBook,
    ExamRecommendation,
    parse_result,
    recommend,
    score_item,
)

__all__ = [
    "DEFAULT_WEIGHTS",
    "ExamAlert",
    "ExamOrder",
    "Finding",
    "OrderBook",
    "ExamRecommendation",
    "parse_result",
    "recommend",
    "score_item",
]

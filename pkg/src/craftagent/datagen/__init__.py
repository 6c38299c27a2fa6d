"""Corpus chunking, Q&A generation prompts and parsing, multiple-choice evaluation."""
from .chunking import CorpusChunk, Section, chunk_corpus, load_corpus, parse_markdown
from .errors import DatagenError, NoPairsFound, NoQuestionsFound, SectionTooLarge, UnknownQAType
from .mcq import (MCQ, AnswerKeyBackend, MCQScore, build_mcq_prompt, extract_choice, parse_mcq, parse_mcq_report,
                  score_mcq)
from .qa import (QA_TYPES, ChunkEchoBackend, QAPair, build_generation_prompt, dedupe, format_pairs,
                 parse_generation_report, parse_generation_response, write_jsonl)

__all__ = [
    "CorpusChunk", "Section", "chunk_corpus", "load_corpus", "parse_markdown", "DatagenError", "NoPairsFound",
    "NoQuestionsFound", "SectionTooLarge", "UnknownQAType", "MCQ", "AnswerKeyBackend", "MCQScore",
    "build_mcq_prompt", "extract_choice", "parse_mcq", "parse_mcq_report", "score_mcq", "QA_TYPES",
    "ChunkEchoBackend", "QAPair", "build_generation_prompt", "dedupe", "format_pairs", "parse_generation_report",
    "parse_generation_response", "write_jsonl",
]

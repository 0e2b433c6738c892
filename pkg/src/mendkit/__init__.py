"""mendkit: a test-suite-driven program repair pipeline engine.

Mines buggy/fixed training pairs, builds retrieval-augmented repair
prompts, merges ranked candidates from an ensemble of generators, and
validates single- and multi-hunk patches against project test suites.
"""

from .context import ContextSpan, LineRange, context_for_hunk, enclosing_function, window_context
from .corpus import (
    CommitRecord,
    Origin,
    TrainingInstance,
    encode_training,
    extract_instances,
    instances_from_commit,
    is_bugfix_commit,
    preprocess,
    preprocess_with_counts,
)
from .encode import HunkExceedsBudgetError, Prompt, TokenBudget, build_prompt, fit_to_budget
from .generate import (
    BackendUnavailableError,
    CandidatePatch,
    EnsembleConfig,
    MalformedResponseError,
    RawCandidate,
    RemoteBackend,
    ReplayBackend,
    ensemble_generate,
)
from .manifest import BugSpec, Manifest, ManifestError, load_manifest
from .rank import MergedCandidate, UniformCandidate, merge_candidates, normalize_ws, uniform_candidates
from .retrieval import (
    EmptyInputError,
    LineIndex,
    RetrievedLine,
    build_line_index,
    cosine,
    embed,
    retrieve,
)
from .validate import (
    Baseline,
    BaselineError,
    RepairResult,
    SandboxError,
    SubprocessHarness,
    SuiteReport,
    detect_flaky,
    is_partial,
    is_plausible,
    measure_baseline,
    validate_multi,
    validate_single,
)

__version__ = "0.1.0"

"""An optimizing mini compiler for IL, a first-order language with
tail calls and nondeterministic system calls.

Modules: syntax (AST, parser, printer, annotations), semantics
(small-step interpreter, anchors, traces), reach and tlive (analysis
inference plus inductive checkers), transform (uce and dve), equiv
(bounded (bi)simulation game and a trace-set oracle), harness (random
differential testing), cli (the `il` command).
"""

from .equiv import (
    Distinguished,
    EquivalentToDepth,
    Exhausted,
    check_bisim,
    check_sim,
    default_probes,
    enumerate_traces,
    make_probes,
)
from .harness import (
    DiffReport,
    GenConfig,
    TrialRecord,
    derive_seed,
    difftest_dve,
    difftest_uce,
    gen_program,
    generator_audit,
    initial_env,
    perturbed_env,
    reach_audit,
    shrink_term,
    tlive_audit,
)
from .reach import Rejection, check_reach, infer_reach, static_branch
from .semantics import (
    Closure,
    Config,
    Cutoff,
    Done,
    Event,
    ListOracle,
    OutOfFuel,
    Ready,
    SeededOracle,
    Terminated,
    Trace,
    apply_extern,
    ctx_resolve,
    run_to_anchor,
    run_trace,
    step_silent,
    trace_text,
)
from .syntax import (
    Annotated,
    App,
    Binop,
    Cond,
    Const,
    Exp,
    Expr,
    Fun,
    FunDef,
    Let,
    ParseError,
    SysCall,
    Term,
    Unop,
    Var,
    ann_walk,
    eval_expr,
    free_term_vars,
    free_vars,
    parse_program,
    parse_sidecar,
    print_program,
    sidecar_text,
    strip,
    term_size,
    truthy,
    well_formed,
    wrap,
    zip_ann,
)
from .tlive import check_tlive, infer_tlive
from .transform import dve, filter_list, filterby, uce

__version__ = "0.1.0"

__all__ = [
    "Annotated",
    "App",
    "Binop",
    "Closure",
    "Cond",
    "Config",
    "Const",
    "Cutoff",
    "DiffReport",
    "Distinguished",
    "Done",
    "EquivalentToDepth",
    "Event",
    "Exhausted",
    "Exp",
    "Expr",
    "Fun",
    "FunDef",
    "GenConfig",
    "Let",
    "ListOracle",
    "OutOfFuel",
    "ParseError",
    "Ready",
    "Rejection",
    "SeededOracle",
    "SysCall",
    "Term",
    "Terminated",
    "Trace",
    "TrialRecord",
    "Unop",
    "Var",
    "ann_walk",
    "apply_extern",
    "check_bisim",
    "check_reach",
    "check_sim",
    "check_tlive",
    "ctx_resolve",
    "default_probes",
    "derive_seed",
    "difftest_dve",
    "difftest_uce",
    "dve",
    "enumerate_traces",
    "eval_expr",
    "filter_list",
    "filterby",
    "free_term_vars",
    "free_vars",
    "gen_program",
    "generator_audit",
    "infer_reach",
    "infer_tlive",
    "initial_env",
    "make_probes",
    "parse_program",
    "parse_sidecar",
    "perturbed_env",
    "print_program",
    "reach_audit",
    "run_to_anchor",
    "run_trace",
    "shrink_term",
    "sidecar_text",
    "static_branch",
    "step_silent",
    "strip",
    "term_size",
    "tlive_audit",
    "trace_text",
    "truthy",
    "uce",
    "well_formed",
    "wrap",
    "zip_ann",
]

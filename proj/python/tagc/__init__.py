"""Tag-aware compiler toolchain for a monitored WHILE language.

The native module provides the interpreters, the compiler, the tag-safe
optimization passes and the differential checking harness.
"""

try:
    from tagc._tagc import *  # noqa: F401,F403  (installed wheel layout)
    from tagc._tagc import __doc__ as _native_doc
except ImportError:  # in-tree build: the extension sits on sys.path directly
    from _tagc import *  # noqa: F401,F403
    from _tagc import __doc__ as _native_doc

__all__ = [
    "policies",
    "run_source",
    "run_compiled",
    "compile_text",
    "compile_dot",
    "diff_campaign",
    "validate_policy",
    "generate_program",
    "dispatch_table",
    "SourceError",
    "ProgramError",
]

__version__ = "0.1.0"

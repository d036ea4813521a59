"""mathcast: context-aware LaTeX to CAS translation, numeric verification and MOI statistics."""

__version__ = "0.1.0"

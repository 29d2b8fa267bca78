"""Deterministic conditional-expectations solvers with exact certificates."""

try:
    from . import _derand as _impl  # installed package layout
except ImportError:  # build-tree layout, module on PYTHONPATH
    import _derand as _impl

mis = _impl.mis
gb = _impl.gb
set_discrepancy = _impl.set_discrepancy
fool_counter = _impl.fool_counter
jl_transform = _impl.jl_transform
__version__ = _impl.__version__

__all__ = ["mis", "gb", "set_discrepancy", "fool_counter", "jl_transform", "__version__"]

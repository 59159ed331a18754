"""Guarded interaction trees with an executable reduction engine.

Modules: ``core`` (trees and combinators), ``effects`` and ``reifiers``
(I/O and store), ``engine`` (fuel-bounded reduction), ``iolang``,
``afflang`` and ``interop`` (the object languages), and ``cli``.
"""

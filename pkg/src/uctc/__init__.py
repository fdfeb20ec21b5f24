"""Desk-scale simulation of unitary post-selection CTC computation.

Modules: ``tensor`` (dense linear algebra), ``circuit`` (gate lists and basis
rules), ``pmf`` (Choi operators and process-matrix channels), ``ctc`` (the
unitary CTC generator), ``cnf`` and ``vv`` (formulas and isolation), ``solver``
(USAT and SAT algorithms), ``cli``.
"""

__version__ = "0.1.0"

"""Backend selection for the counting kernels.

The compiled extension ``_kernels`` is used when it imports; otherwise, or
when ``PATTERNLAB_PURE_PYTHON`` is set to a non-empty value, the pure-Python
module ``_pykernels`` is used. Both expose the same functions.
"""

import os

from . import _pykernels

python_backend = _pykernels

try:
    from . import _kernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and not os.environ.get("PATTERNLAB_PURE_PYTHON"):
    backend = compiled_backend
else:
    backend = python_backend

BACKEND = backend.NAME

count_word_pattern = backend.count_word_pattern
count_word_pattern_many = backend.count_word_pattern_many
count_arc_pattern = backend.count_arc_pattern
count_arc_pattern_many = backend.count_arc_pattern_many
urns_to_next = backend.urns_to_next

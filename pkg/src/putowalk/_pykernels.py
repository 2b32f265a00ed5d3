"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels`` must agree with them to
rounding.  Array conventions are shared by both backends:

* lattice amplitudes are a C-contiguous ``(nsites, D)`` complex128 array
  over a flattened box, and a stage is a list of ``(D, D)`` blocks paired
  with flat index offsets;
* matrix batches are ``(n, rows, cols)`` complex128 arrays.
"""

import numpy as np

NAME = "python"


def apply_stage(psi, out, blocks, offsets, starts, stops):
    """Accumulate ``out[i + off_k] += blocks[k] @ psi[i]`` over the index ranges.

    ``starts``/``stops`` are sorted half-open ranges holding every nonzero row
    of ``psi``.  One slice spanning all of them is used here, which is only
    valid because the rows between ranges are zero.
    """
    if len(starts) == 0:
        return
    lo, hi = int(starts[0]), int(stops[-1])
    src = psi[lo:hi]
    for block, off in zip(blocks, offsets):
        off = int(off)
        out[lo + off:hi + off] += src @ block.T


def extreme_singular_values(mats):
    """Smallest and largest singular value of every matrix in a batch."""
    mats = np.asarray(mats, dtype=np.complex128)
    if mats.ndim != 3:
        raise ValueError("expected a (n, rows, cols) batch")
    if mats.shape[0] == 0:
        empty = np.empty(0)
        return empty, empty.copy()
    sv = np.linalg.svd(mats, compute_uv=False)
    return sv[:, -1].copy(), sv[:, 0].copy()

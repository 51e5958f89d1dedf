"""Pure-Python outcome-tree walker; same contract as the compiled one."""
import numpy as np


def walk_tree(cond, first_child, uniforms):
    """Leaf index reached by each row of ``uniforms``.

    Row ``t`` consumes ``uniforms[t, d]`` at depth ``d`` and picks the
    first child whose cumulative conditional probability exceeds it.
    """
    cond = [float(x) for x in cond]
    first_child = [int(x) for x in first_child]
    out = np.empty(len(uniforms), dtype=np.int64)
    for t, row in enumerate(uniforms.tolist()):
        node = 0
        d = 0
        fc = first_child[0]
        while fc >= 0:
            u = row[d]
            acc = 0.0
            c = 0
            while c < 3:
                acc += cond[fc + c]
                if u < acc:
                    break
                c += 1
            node = fc + c
            d += 1
            fc = first_child[node]
        out[t] = node
    return out

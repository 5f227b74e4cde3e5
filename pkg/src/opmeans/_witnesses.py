"""Stored counterexample: log-Euclidean mean is not monotone in the Loewner order.

Found by :func:`opmeans.theorem_lab.search_p4_violation_log_euclidean` with
``seed=42``, ``dim=2``, ``n=2``.  ``A_i <= B_i`` for each ``i`` while
``G_E(A) - G_E(B)`` has a positive eigenvalue.
"""
import numpy as np

LOG_EUCLIDEAN_P4_WEIGHTS = np.array([0.5, 0.5])
LOG_EUCLIDEAN_P4_A = [
    np.array([[5.2595329586029678, 19.928697616669698], [19.928697616669698, 146.70189414636897]]),
    np.array([[434.14800940392314, 271.90086586535563], [271.90086586535563, 200.09146510879953]]),
]
LOG_EUCLIDEAN_P4_B = [
    np.array([[5.2597477283007468, 19.929066165910221], [19.929066165910221, 146.70252658448337]]),
    np.array([[434.33908035547353, 268.6586671521402], [268.6586671521402, 255.10690524075483]]),
]

"""
CLI experiments for mimolab.

One module per experiment:
- power_ratio: DFT vs eigen basis sparsity
- srs_mse: cyclic-shift hopping vs fixed shift
- cjt_sinr: single-TRP vs coherent joint transmission
- predict: Doppler prediction vs stale CSI
- beam_sim: DCI vs MAC-CE beam indication
- upt: user perceived throughput of burst logs
- occ: DMRS OCC-2 vs OCC-4 leakage
"""

from .orchestrator import REGISTRY, Experiment, run_experiment, run_single_drop

__all__ = [
    "REGISTRY",
    "Experiment",
    "run_experiment",
    "run_single_drop",
]

"""
Numerical kernels for mimolab.

Modules:
- channel: multipath channel synthesis and spatial/frequency bases
- codebook: Type-I, enhanced Type-II, CJT and Doppler-domain CSI compression
- srs: sounding sequences, cyclic-shift hopping and delay-domain estimation
- prediction: angle-delay Doppler tracking and CSI extrapolation
- evaluator: multi-TRP SINR, throughput, uplink precoding and DMRS OCC
- beams: beam tracking under DCI / MAC-CE indication latency
"""

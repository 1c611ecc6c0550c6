"""
stnf: 非標準算術の正規形ワークベンチ
"""
__version__ = "0.1.0"

"""
One-shot public and private capacity regions of quantum wiretap channels.
"""

from oneshot_qcap.config import QcapConfig

__version__ = QcapConfig.VERSION

__all__ = ['QcapConfig', '__version__']

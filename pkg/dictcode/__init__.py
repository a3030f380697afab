from .cli import cli
from .core import Code, Dictionary, DictcodeError, Word

__all__ = ["cli", "Code", "Dictionary", "DictcodeError", "Word"]

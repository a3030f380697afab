"""
.. module:: validators

This module contains the readers of the package's text formats (dictionaries,
codes, noise profiles, channels, received words and experiment configuration)
and the click callbacks that validate CLI parameters with them.

Readers raise :py:class:`~dictcode.core.FormatError` with file and line for
syntax problems and :py:class:`~dictcode.core.DomainError` for values outside
their domain. The callbacks turn the former into :py:class:`click.FileError`
(exit code 1) and the latter into :py:class:`click.BadParameter` (exit code 2).
"""

import configparser
import contextlib

import click
import numpy as np

from .binary_channel import NoiseProfile
from .conflict import DMC
from .core import (Alphabet, BINARY, Code, DictcodeError, Dictionary,
                   DomainError, FormatError, ReceivedWord, Word, min_distance)
from .entropy import Distribution


#: Keys accepted in the [dictcode] section of an experiment file.
COMMON_KEYS = ("seed", "trials", "eps")


def _lines(path):
    """Yield (line number, stripped line) for non-blank lines."""
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            line = line.strip()
            if line:
                yield number, line


def _header(line, keys, path, number):
    """Parse ``key=value`` integer fields of a header line."""
    fields = dict()
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep or key not in keys:
            raise FormatError(f"unexpected header field {token!r}", path,
                              number)
        try:
            fields[key] = int(value)
        except ValueError:
            raise FormatError(f"header field {key} is not an integer", path,
                              number)
    missing = [k for k in keys if k not in fields]
    if missing:
        raise FormatError(f"header lacks {', '.join(missing)}", path, number)
    return fields


def _float(text, path, number):
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"{text!r} is not a number", path, number)


def _read_words(lines, n, alphabet, path):
    words = list()
    seen = dict()
    for number, line in lines:
        try:
            word = Word.parse(line, alphabet)
        except DomainError as e:
            raise FormatError(str(e), path, number)
        if word.length != n:
            raise FormatError(f"word has length {word.length}, expected {n}",
                              path, number)
        if word in seen:
            raise FormatError(f"duplicate of line {seen[word]}", path, number)
        seen[word] = number
        words.append(word)
    return words


def read_dictionary(path):
    """Read a dictionary file.

    The first line is ``n=<length> N=<alphabet size>``, followed by one word
    per line.

    Args:
        path (str): file name

    Raises:
        FormatError: on a malformed header, word or duplicate line

    Returns:
        Dictionary: the words in file order
    """

    lines = _lines(path)
    number, line = next(lines, (1, ""))
    header = _header(line, ("n", "N"), path, number)
    alphabet = Alphabet.standard(header["N"])
    return Dictionary(header["n"],
                      tuple(_read_words(lines, header["n"], alphabet, path)),
                      alphabet)


def read_code(path):
    """Read a code file: a dictionary header, a ``d=<distance>`` line and
    the code words.

    Raises:
        FormatError: on malformed content
        DomainError: if the words are closer than the claimed distance

    Returns:
        Code: the code with its claimed distance
    """

    lines = _lines(path)
    number, line = next(lines, (1, ""))
    header = _header(line, ("n", "N"), path, number)
    number, line = next(lines, (number + 1, ""))
    claimed = _header(line, ("d",), path, number)["d"]
    alphabet = Alphabet.standard(header["N"])
    code = Code(tuple(_read_words(lines, header["n"], alphabet, path)),
                claimed_distance=claimed)
    if code.size == 0:
        raise FormatError("code file contains no words", path)
    if code.size >= 2:
        actual = min_distance(code)
        if actual < claimed:
            raise DomainError(f"{path}: code claims d={claimed} but its "
                              f"minimum distance is {actual}")
    return code


def read_profile(path):
    """Read a noise profile.

    The first line is ``n=<length>``; then either one line
    ``uniform p_f=<v> p_e=<v>`` or lines ``i p_f p_e`` with 1-based
    positions. Positions that are not listed are noiseless.

    Raises:
        FormatError: on malformed lines or repeated positions
        DomainError: on probabilities outside their range

    Returns:
        NoiseProfile: the profile
    """

    lines = _lines(path)
    number, line = next(lines, (1, ""))
    n = _header(line, ("n",), path, number)["n"]
    if n < 1:
        raise FormatError("profile length must be positive", path, number)
    p_f = np.zeros(n)
    p_e = np.zeros(n)
    listed = dict()
    for number, line in lines:
        parts = line.split()
        if parts[0] == "uniform":
            if listed or len(parts) != 3:
                raise FormatError("uniform shorthand must be the only entry "
                                  "and read 'uniform p_f=<v> p_e=<v>'",
                                  path, number)
            values = dict(part.partition("=")[::2] for part in parts[1:])
            if set(values) != {"p_f", "p_e"}:
                raise FormatError("uniform shorthand needs p_f and p_e",
                                  path, number)
            p_f[:] = _float(values["p_f"], path, number)
            p_e[:] = _float(values["p_e"], path, number)
            listed["uniform"] = number
            continue
        if len(parts) != 3 or "uniform" in listed:
            raise FormatError("expected 'i p_f p_e'", path, number)
        try:
            i = int(parts[0])
        except ValueError:
            raise FormatError(f"position {parts[0]!r} is not an integer",
                              path, number)
        if not 1 <= i <= n:
            raise FormatError(f"position {i} outside 1..{n}", path, number)
        if i in listed:
            raise FormatError(f"position {i} already given on line "
                              f"{listed[i]}", path, number)
        listed[i] = number
        p_f[i - 1] = _float(parts[1], path, number)
        p_e[i - 1] = _float(parts[2], path, number)
    try:
        return NoiseProfile(p_f, p_e)
    except DomainError as e:
        raise DomainError(f"{path}: {e}")


def read_channel(path):
    """Read a channel file: ``X=<size> Y=<size>`` and X rows of Y numbers.

    Raises:
        FormatError: on a malformed header or row shape
        DomainError: if a row is not a probability distribution

    Returns:
        DMC: the channel
    """

    lines = _lines(path)
    number, line = next(lines, (1, ""))
    header = _header(line, ("X", "Y"), path, number)
    rows = list()
    for number, line in lines:
        row = [_float(v, path, number) for v in line.split()]
        if len(row) != header["Y"]:
            raise FormatError(f"row has {len(row)} entries, expected "
                              f"{header['Y']}", path, number)
        rows.append(row)
    if len(rows) != header["X"]:
        raise FormatError(f"found {len(rows)} rows, expected {header['X']}",
                          path)
    try:
        return DMC(np.array(rows))
    except DomainError as e:
        raise DomainError(f"{path}: {e}")


def read_received(path, n=None, alphabet=BINARY):
    """Read received words, one per line over the symbols and ``e``.

    Args:
        path (str): file name
        n (int, optional): required length of every word
        alphabet (Alphabet): symbol alphabet

    Returns:
        list: :py:class:`~dictcode.core.ReceivedWord` objects in file order
    """

    received = list()
    for number, line in _lines(path):
        try:
            word = ReceivedWord.parse(line, alphabet)
        except DomainError as e:
            raise FormatError(str(e), path, number)
        if n is not None and word.length != n:
            raise FormatError(f"received word has length {word.length}, "
                              f"expected {n}", path, number)
        received.append(word)
    return received


def parse_distribution(text):
    """Parse a comma-separated probability vector such as ``0.5,0.5``."""
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise DomainError(f"{text!r} is not a comma-separated list of "
                          f"numbers")
    return Distribution(np.array(values), max(2, len(values)))


def read_config(path, commands):
    """Read an experiment file into a click ``default_map``.

    The ``[dictcode]`` section sets seed, trials and eps for every command;
    a section named after a command sets defaults for that command only.

    Args:
        path (str): INI file name
        commands (dict): command name -> collection of parameter names

    Raises:
        FormatError: on unknown sections or keys

    Returns:
        dict: command name -> {parameter name: value}
    """

    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as f:
            parser.read_file(f)
    except configparser.Error as e:
        raise FormatError(f"incorrect configuration format ({e.message})",
                          path)

    common = dict()
    if parser.has_section("dictcode"):
        for key, value in parser["dictcode"].items():
            if key not in COMMON_KEYS:
                raise FormatError(f"unknown key {key!r} in [dictcode]", path)
            common[key] = value

    default_map = {name: dict(common) for name in commands}
    for section in parser.sections():
        if section == "dictcode":
            continue
        if section not in commands:
            raise FormatError(f"unknown section [{section}]", path)
        for key, value in parser[section].items():
            name = key.replace("-", "_")
            if name not in commands[section]:
                raise FormatError(f"unknown key {key!r} in [{section}]", path)
            default_map[section][name] = value
    return default_map


@contextlib.contextmanager
def _as_click_errors(value):
    try:
        yield
    except FormatError as e:
        raise click.FileError(str(value), hint=str(e))
    except OSError as e:
        raise click.FileError(str(value), hint=e.strerror)
    except DictcodeError as e:
        raise click.BadParameter(str(e))


def validate_dictionary(ctx, param, path):
    """Callback to load and validate a dictionary file.

    Args:
        ctx: context object obtained from click
        param: parameter object obtained from click
        path (str): name of the dictionary file, or None

    Raises:
        FileError: if the file is unreadable or malformed
        BadParameter: if its content is out of domain

    Returns:
        Dictionary: the loaded dictionary
    """

    if path is None:
        return None
    with _as_click_errors(path):
        return read_dictionary(path)


def validate_code(ctx, param, path):
    """Callback to load a code file and check its claimed distance.

    A ``d=`` line in the header must equal the minimum distance computed
    from the words; a mismatch names the true distance.

    Args:
        ctx: context object obtained from click
        param: parameter object obtained from click
        path (str): name of the code file, or None

    Raises:
        FileError: if the file is unreadable or malformed
        BadParameter: if the claimed distance is wrong

    Returns:
        Code: the loaded code
    """

    if path is None:
        return None
    with _as_click_errors(path):
        return read_code(path)


def validate_profile(ctx, param, path):
    """Callback to load a noise profile.

    Args:
        ctx: context object obtained from click
        param: parameter object obtained from click
        path (str): name of the profile file, or None

    Raises:
        FileError: if the file is unreadable or malformed
        BadParameter: if p_f + p_e exceeds 1 at some position

    Returns:
        NoiseProfile: the per-position flip and erasure probabilities
    """

    if path is None:
        return None
    with _as_click_errors(path):
        return read_profile(path)


def validate_channel(ctx, param, path):
    """Callback to load a channel file.

    A row that does not sum to one is reported as a bad parameter quoting
    the row and its sum.

    Args:
        ctx: context object obtained from click
        param: parameter object obtained from click
        path (str): name of the channel file, or None

    Raises:
        FileError: if the file is unreadable or a row has the wrong width
        BadParameter: if an entry is negative or a row does not sum to one

    Returns:
        DMC: the channel
    """

    if path is None:
        return None
    with _as_click_errors(path):
        return read_channel(path)


def validate_distribution(ctx, param, text):
    """Callback to parse an input distribution such as ``0.5,0.5``.

    Args:
        ctx: context object obtained from click
        param: parameter object obtained from click
        text (str): comma-separated probabilities, or None

    Raises:
        BadParameter: if an entry is not a probability or they do not sum
                      to one

    Returns:
        Distribution: the parsed distribution
    """

    if text is None:
        return None
    try:
        return parse_distribution(text)
    except DictcodeError as e:
        raise click.BadParameter(str(e))


def validate_eps(ctx, param, value):
    """Callback to check that a slack parameter lies in (0, 1).

    Args:
        ctx: context object obtained from click
        param: parameter object obtained from click
        value (float): the slack, or None

    Raises:
        BadParameter: unless 0 < *value* < 1

    Returns:
        float: the provided *value*
    """

    if value is not None and not 0 < value < 1:
        raise click.BadParameter("must lie strictly between 0 and 1")
    return value


def validate_config(ctx, param, path):
    """Callback to install an experiment file as the defaults of every
    subcommand.

    Each section names a subcommand and each key one of its options, so
    values from the file act as defaults that the command line overrides.

    Args:
        ctx: context object obtained from click
        param: parameter object obtained from click
        path (str): name of the experiment file, or None

    Raises:
        FileError: if the file is unreadable or names an unknown section
                   or key

    Returns:
        str: the provided *path*
    """

    if path is None:
        return None
    commands = {name: {p.name for p in command.params}
                for name, command in ctx.command.commands.items()}
    with _as_click_errors(path):
        ctx.default_map = read_config(path, commands)
    return path

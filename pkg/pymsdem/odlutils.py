# coding: utf-8
"""
pymsdem.odlutils

Parser and serializer for the plain-text key/value format of scene files.

A scene file looks like this:
GROUP = SCENE
  NAME = "impact-wall"
  SEED = 42
END_GROUP = SCENE
GROUP = MATERIAL
  NAME = "glass"
  YOUNG = 1e10          # Pa
  ...
END_GROUP = MATERIAL
GROUP = MATERIAL
  ...
END_GROUP = MATERIAL
END

Values are Python literals (numbers, quoted strings, tuples, booleans);
anything else is kept as a bare string. `#` starts a comment outside of
quotes. Groups may nest; a group name repeated at one level collects into
a list of groups.
"""

from __future__ import division, print_function, absolute_import

from future import standard_library
standard_library.install_aliases()

import re
from io import StringIO
from ast import literal_eval
from collections import OrderedDict
import logging

from pymsdem.demhelpers import SceneParseError, loglevel

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.odlutils')

# Elements from the file format used for parsing
GRPSTART = "GROUP="
GRPEND = "END_GROUP="
ASSIGNCHAR = "="
FINAL = "END"
INDENT = "  "

KEYPATTERN = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')

# A state machine is used to parse the file. There are 5 states (0 to 4):
STATUSCODE = [
    "begin",
    "enter group",
    "add item",
    "leave group",
    "end"
]


def _stripcomment(line):
    """Removes a trailing # comment that is not inside quotes"""
    quote = None
    for idx, char in enumerate(line):
        if quote:
            if char == quote:
                quote = None
        elif char in ('"', "'"):
            quote = char
        elif char == '#':
            return line[:idx]
    return line


def _sanitizeline(line):
    line = _stripcomment(line).strip()
    key, sep, value = line.partition(ASSIGNCHAR)
    if sep:
        return key.strip() + sep + value.strip()
    return line


# Help functions to identify the current line and extract information
def _islinetype(line, testchar):
    """Checks for various kinds of line types based on line head"""
    return line.startswith(testchar)


def _isassignment(line):
    return ASSIGNCHAR in line


def _isfinal(line):
    return line == FINAL


def _getgroupname(line):
    return line.split(GRPSTART, 1)[-1]


def _getendgroupname(line):
    return line.split(GRPEND, 1)[-1]


def _getitem(line):
    """Returns key/value pair for assignment type lines"""
    key, value = line.split(ASSIGNCHAR, 1)
    return key, value


def _checkstatus(status, line, lineno):
    """Returns state/status after reading the next line.

    The status codes are::
        0 - BEGIN parsing; 1 - ENTER GROUP, 2 - READ KEY-VALUE PAIR,
        3 - END GROUP, 4 - END PARSING

    Permitted Transitions::
        0 --> 1, 0 --> 4
        1 --> 1, 1 --> 2, 1 --> 3
        2 --> 1, 2 --> 2, 2 --> 3
        3 --> 1, 3 --> 2, 3 --> 3, 3 --> 4
    """
    newstatus = 0
    if status == 0:
        if _islinetype(line, GRPSTART):
            newstatus = 1
        elif _isfinal(line):
            newstatus = 4
    elif status in (1, 2):
        if _islinetype(line, GRPSTART):
            newstatus = 1
        elif _islinetype(line, GRPEND):
            newstatus = 3
        elif _isassignment(line):
            # test AFTER start and end, as both are also assignments
            newstatus = 2
    elif status == 3:
        if _islinetype(line, GRPSTART):
            newstatus = 1
        elif _islinetype(line, GRPEND):
            newstatus = 3
        elif _isfinal(line):
            newstatus = 4
        elif _isassignment(line):
            newstatus = 2
    elif status == 4:
        raise SceneParseError("Content after END: '%s'" % line, lineno)
    if newstatus == 0:
        raise SceneParseError(
            "Cannot parse the following line after status "
            "'%s': %s" % (STATUSCODE[status], line), lineno)
    return newstatus


def _transstat(status, grouppath, dictpath, line, lineno):
    """Executes processing steps when reading a line"""
    if status == 1:
        currentdict = dictpath[-1]
        currentgroup = _getgroupname(line)
        if not KEYPATTERN.match(currentgroup):
            raise SceneParseError(
                "Invalid group name '%s'" % currentgroup, lineno)
        newgroup = OrderedDict()
        if currentgroup in currentdict:
            existing = currentdict[currentgroup]
            if isinstance(existing, list):
                existing.append(newgroup)
            elif isinstance(existing, OrderedDict):
                currentdict[currentgroup] = [existing, newgroup]
            else:
                raise SceneParseError(
                    "Group '%s' clashes with a key" % currentgroup, lineno)
        else:
            currentdict[currentgroup] = newgroup
        grouppath.append(currentgroup)
        dictpath.append(newgroup)
    elif status == 2:
        if not grouppath:
            raise SceneParseError("Assignment outside of a group", lineno)
        currentdict = dictpath[-1]
        newkey, newval = _getitem(line)
        if not KEYPATTERN.match(newkey):
            raise SceneParseError("Invalid key '%s'" % newkey, lineno)
        if newkey in currentdict:
            raise SceneParseError(
                "Duplicate key '%s' in group '%s'"
                % (newkey, grouppath[-1]), lineno)
        currentdict[newkey] = parse_value(newval)
    elif status == 3:
        oldgroup = _getendgroupname(line)
        if not grouppath:
            raise SceneParseError(
                "END_GROUP = %s without open group" % oldgroup, lineno)
        if oldgroup != grouppath[-1]:
            raise SceneParseError(
                "Reached line '%s' while reading group '%s'."
                % (line, grouppath[-1]), lineno)
        del grouppath[-1]
        del dictpath[-1]
    elif status == 4:
        if grouppath:
            raise SceneParseError(
                "Reached END before end of group '%s'" % grouppath[-1],
                lineno)
    return grouppath, dictpath


def parse_value(valuestr):
    """Takes value as str, returns the Python literal it spells, or the
    bare string"""
    if not valuestr:
        return ''
    try:
        return literal_eval(valuestr)
    except (ValueError, SyntaxError):
        pass
    LOGGER.debug("Value %s is not a literal, kept as string" % valuestr)
    return valuestr


def _parsestream(filehandle):
    status = 0
    data = OrderedDict()
    grouppath = []
    dictpath = [data]
    lineno = 0
    for lineno, line in enumerate(filehandle, 1):
        line = _sanitizeline(line)
        if not line:
            continue
        status = _checkstatus(status, line, lineno)
        grouppath, dictpath = _transstat(status, grouppath, dictpath, line,
                                         lineno)
    if status != 4:
        if grouppath:
            raise SceneParseError(
                "Unexpected end of file inside group '%s'" % grouppath[-1],
                lineno)
        raise SceneParseError("Missing final END", lineno)
    return data


def parse(text):
    """Parses a scene document given as a string. Returns an OrderedDict
    of groups."""
    return _parsestream(StringIO(u"%s" % text))


def parsefile(filepath):
    """Parses the scene file at filepath"""
    with open(filepath, 'r') as filehandle:
        return _parsestream(filehandle)


def _formatvalue(value):
    if isinstance(value, str):
        if '"' in value or '\\' in value or '\n' in value:
            return repr(value)
        return '"%s"' % value
    return repr(value)


def _dumpgroup(name, group, depth, lines):
    pad = INDENT * depth
    lines.append("%sGROUP = %s" % (pad, name))
    for key, value in group.items():
        if value is None:
            continue
        if isinstance(value, dict):
            _dumpgroup(key, value, depth + 1, lines)
        elif isinstance(value, list) and value and \
                all(isinstance(item, dict) for item in value):
            for item in value:
                _dumpgroup(key, item, depth + 1, lines)
        else:
            lines.append("%s%s%s = %s" % (pad, INDENT, key,
                                          _formatvalue(value)))
    lines.append("%sEND_GROUP = %s" % (pad, name))


def dumps(data):
    """Serializes a dict of groups (as returned by parse) to text. Keys
    whose value is None are left out."""
    lines = []
    for name, group in data.items():
        if isinstance(group, list):
            for item in group:
                _dumpgroup(name, item, 0, lines)
        elif isinstance(group, dict):
            _dumpgroup(name, group, 0, lines)
        else:
            raise SceneParseError(
                "Top level entry '%s' must be a group" % name)
    lines.append(FINAL)
    return "\n".join(lines) + "\n"

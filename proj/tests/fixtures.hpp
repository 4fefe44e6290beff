#pragma once

#include <set>
#include <string>
#include <vector>

namespace fixtures {

struct ImportCase {
  const char* name;
  std::string source;
  std::set<std::string> expected;
};

// Hand-traced against the import grammar.
inline std::vector<ImportCase> import_cases() {
  return {
      {"alias and from-import", "import pandas as pd\nfrom sklearn.linear_model import LinearRegression",
       {"pandas", "sklearn"}},
      {"empty", "", {}},
      {"relative import and comment", "from . import utils\nx = 1 # import fake", {}},
      {"plain", "import os", {"os"}},
      {"dotted truncated", "import os.path", {"os"}},
      {"multi-import line", "import os, sys, json", {"json", "os", "sys"}},
      {"multi-import with aliases", "import numpy as np, scipy.stats as st", {"numpy", "scipy"}},
      {"parenthesized from", "from collections import (OrderedDict,\n    defaultdict)", {"collections"}},
      {"parenthesized trailing comma", "from typing import (\n  Any,\n  Dict,\n)\n", {"typing"}},
      {"parenthesized with alias", "from a.b import (x as y, z)", {"a"}},
      {"star import", "from math import *", {"math"}},
      {"relative dotted", "from .models import User\nfrom ..core import base", {}},
      {"try except fallback", "try:\n    import ujson as json\nexcept ImportError:\n    import json\n",
       {"json", "ujson"}},
      {"one-line try", "try: import simplejson\nexcept ImportError: pass", {"simplejson"}},
      {"indented in function", "def f():\n    import requests\n    return requests", {"requests"}},
      {"commented out", "# import torch\nimport numpy  # import scipy", {"numpy"}},
      {"inside string", "s = \"import flask\"\nt = '''\nimport django\n'''\n", {}},
      {"semicolon separated", "import os; import sys", {"os", "sys"}},
      {"backslash continuation", "from matplotlib import \\\n    pyplot", {"matplotlib"}},
      {"mixed case lowercased", "import PIL.Image", {"pil"}},
      {"broken statement ignored", "import \nimport re\nfrom x", {"re"}},
      {"incomplete parenthesized", "from itertools import (chain,\n", {}},
      {"keyword as module rejected", "import class", {}},
      {"identifier containing import", "important = 1\nreimport(x)\nfrom_x = 2", {}},
      {"conditional import", "if TYPE_CHECKING: from typing_extensions import Protocol", {"typing_extensions"}},
      {"crlf line endings", "import os\r\nimport sys\r\n", {"os", "sys"}},
      {"import after docstring", "\"\"\"Module doc. import nothing\"\"\"\nimport logging\n", {"logging"}},
      {"future import", "from __future__ import annotations", {"__future__"}},
  };
}

struct NotebookCase {
  const char* name;
  std::string json;
  std::vector<std::string> expected;
  bool malformed;
};

inline std::vector<NotebookCase> notebook_cases() {
  return {
      {"markdown then list source",
       R"({"nbformat":4,"cells":[{"cell_type":"markdown","source":"hi"},)"
       R"nb({"cell_type":"code","source":["import os\n","print(1)"]}]})nb",
       {"import os\nprint(1)"},
       false},
      {"zero cells", R"({"nbformat":4,"cells":[]})", {}, false},
      {"string source", R"({"cells":[{"cell_type":"code","source":"import re"},{"cell_type":"raw","source":"x"}]})",
       {"import re"},
       false},
      {"not json", "not json", {}, true},
      {"missing cells", R"({"nbformat":4})", {}, true},
      {"cells not array", R"({"cells":{}})", {}, true},
  };
}

}  // namespace fixtures

#include <pybind11/pybind11.h>
PYBIND11_MODULE(_revadv, m) { m.doc() = "stub"; }

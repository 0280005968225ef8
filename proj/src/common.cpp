// SPDX-License-Identifier: Apache-2.0

#include "qoc/common.hpp"

#include <cstdio>

namespace qoc {

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace qoc

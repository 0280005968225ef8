// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "corpus.hpp"
#include "qoc/allocator.hpp"
#include "qoc/common.hpp"

namespace fs = std::filesystem;
using namespace qoc;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: export_corpus <dir> [count]\n";
    return 2;
  }
  const fs::path dir = argv[1];
  const int count = argc > 2 ? std::stoi(argv[2]) : 30;
  fs::create_directories(dir);
  std::ofstream index(dir / "index.txt");
  std::mt19937_64 rng(4242);
  for (int k = 0; k < count; ++k) {
    const auto inst = qoc::testing::random_instance(rng);
    for (alloc::Scheme s : alloc::all_schemes) {
      const fs::path file = dir / ("case" + std::to_string(k) + "_" + std::string(alloc::scheme_name(s)) + ".lp");
      std::ofstream(file) << alloc::export_lp(inst, s);
      std::string expected;
      try {
        expected = format_decimal(alloc::solve(inst, s).objective_value);
      } catch (const InfeasibleError&) {
        expected = "inf";
      }
      index << file.string() << ' ' << expected << '\n';
    }
  }
  return 0;
}

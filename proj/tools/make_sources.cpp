// Writes seeded synthetic source images for demos and tests.
#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "synthetic_sources.hpp"

int main(int argc, char** argv) {
  CLI::App app{"make_sources: seeded synthetic PNG sources"};
  std::string out;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::string prefix = "s";
  int size = 96;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--count", count, "number of images")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--prefix", prefix, "id prefix");
  app.add_option("--size", size, "edge length in pixels")->check(CLI::Range(8, 4096));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    const auto entries = patternforge::tools::write_synthetic_sources(out, count, seed, prefix, size, size);
    std::cout << "wrote " << entries.size() << " images to " << out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "make_sources: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

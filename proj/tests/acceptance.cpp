// Evaluates the acceptance table on the reference configuration and prints one
// line per criterion. Exit status 0 only when every criterion passes.

#include <filesystem>
#include <iostream>

#include "cli.hpp"
#include "snail/errors.hpp"
#include "snail/parallel.hpp"

using namespace snail;

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
  try {
    Config config = Config::defaults();
    config.merge_file(std::string(SNAIL_SOURCE_DIR) + "/configs/paper.json");
    const int threads = default_threads();
    cli::Run run("reproduce", config, out, 1234, threads);
    const Device dev = build_device(run.config(), threads);
    const std::vector<cli::Criterion> table = cli::cmd_reproduce(run, dev, true);
    run.finish();
    bool ok = true;
    for (const cli::Criterion& c : table) {
      std::cout << cli::format_criterion(c) << std::endl;
      ok = ok && c.pass;
    }
    std::cout << (ok ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 3;
  }
}

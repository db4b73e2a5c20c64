#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lts/cli.hpp"

int main(int argc, char** argv) {
  lts::RunConfig config;

  CLI::App app{
      "Exact least trimmed squares regression: scans all candidate "
      "boundary points of the trimmed objective and returns the global "
      "minimum, with an optional brute-force cross-check."};

  // The trim count is spelled --h, so the help flag cannot also claim -h.
  app.set_help_flag("--help", "print this message and exit");

  app.add_option("input", config.input_path, "CSV file with the response and regressor columns");
  app.add_option("--response", config.response,
                 "response column, by header name or 1-based ordinal (default: 1)");
  app.add_option("--h", config.h_spec,
                 "observations to retain: an integer count, or a fraction of n when "
                 "< 1 or written with a decimal point (default: floor((n+p+1)/2))");
  app.add_flag("--intercept", config.intercept, "prepend a constant-one column to X");
  app.add_option("--algorithm", config.algorithm, "bsa | exact | both (default: bsa)")
      ->check(CLI::IsMember({"bsa", "exact", "both"}));
  app.add_option("--report", config.report_format, "json | csv | text (default: json)")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_flag("--landscape", config.landscape,
               "emit the full 1-D objective landscape (requires p = 1)");
  app.add_option("--threads", config.threads, "worker threads (default: 1)");
  app.add_option("--tol", config.residual_eq_tol,
                 "relative tolerance for residual-equality tests (default: 1e-8)");
  app.add_option("--cap", config.cap,
                 "subset budget for the exhaustive enumerator (default: 2000000)");
  app.add_option("--gen", config.gen_spec,
                 "generate a seeded instance \"seed,n,p,frac\" instead of reading a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return lts::kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lts::kExitInput;
  }

  return lts::run(config, std::cout, std::cerr);
}

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fglchern/dsl.hpp"
#include "fglchern/report.hpp"
#include "fglchern/suite.hpp"

namespace {

int run_reports(const std::vector<fglchern::Report>& reports, const std::string& format,
                int cap) {
  if (format == "json")
    std::cout << fglchern::emit_json(reports, cap);
  else
    std::cout << fglchern::emit_text(reports);
  return fglchern::any_failed(reports) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fglchern: exact symbolic checks for formal group laws, Chern classes,\n"
               "pushforwards and Todd-twisted transformations"};

  int cap = 6;
  app.add_option("--cap", cap, "Degree cap for laws and checks (env FGL_CHERN_CAP)")
      ->envname("FGL_CHERN_CAP")
      ->check(CLI::Range(2, 24))
      ->capture_default_str();

  std::string format = "text";
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for independent checks")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();

  unsigned seed = 20260818;
  app.add_option("--seed", seed, "Seed for randomized suite instances")
      ->capture_default_str();

  std::string suite_name;
  app.add_option("--suite", suite_name, "Run a named built-in check suite")
      ->check(CLI::IsMember({"paper"}));

  std::string script_path;
  CLI::App* verify = app.add_subcommand(
      "verify", "Parse a script of declarations and checks and run every check");
  verify->add_option("file", script_path, "Script file to verify")->required();
  verify->fallthrough();  // let --format and friends appear after the subcommand

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const bool want_suite = !suite_name.empty();
  const bool want_verify = verify->parsed();
  if (want_suite == want_verify) {
    std::cerr << "usage: pass exactly one of --suite <name> or verify <file>\n";
    return 2;
  }

  try {
    if (want_suite) {
      fglchern::SuiteOptions opts;
      opts.cap = cap;
      opts.seed = seed;
      opts.jobs = jobs;
      return run_reports(fglchern::run_suite(fglchern::builtin_suite(), opts), format,
                         cap);
    }

    std::ifstream in(script_path);
    if (!in) {
      std::cerr << script_path << ": cannot open file\n";
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    fglchern::dsl::Script script;
    try {
      script = fglchern::dsl::parse(buf.str());
    } catch (const fglchern::dsl::ParseError& ex) {
      std::cerr << script_path << ": " << ex.what() << "\n";
      return 2;
    }

    fglchern::dsl::RunOptions opts;
    opts.cap = cap;
    opts.jobs = jobs;
    return run_reports(fglchern::dsl::run_script(script, opts), format, cap);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}

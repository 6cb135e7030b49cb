// rovib_cli: solve | converge | calibrate | expand
// Exit codes: 0 ok, 2 configuration or input error, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rovib/driver.hpp"

namespace {

struct Args {
  std::string config;
  std::string out = ".";
  int threads = 0;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config, "INI run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--threads", a.threads, "worker threads (overrides [solver] threads)")->check(CLI::PositiveNumber);
}

rovib::RunConfig load(const Args& a) {
  auto c = rovib::load_config(a.config);
  if (a.threads > 0) c.threads = a.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotation-vibration levels of a heavy-atom ligand complex"};
  app.require_subcommand(1);
  Args a;
  auto* solve = app.add_subcommand("solve", "lowest levels, properties and densities");
  auto* converge = app.add_subcommand("converge", "level changes along truncation sweeps");
  auto* calibrate = app.add_subcommand("calibrate", "fit the bend force constant to a target frequency");
  auto* expand = app.add_subcommand("expand", "angular expansion coefficients of the surfaces");
  for (auto* c : {solve, converge, calibrate, expand}) add_common(c, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto c = load(a);
    if (solve->parsed()) {
      const auto s = rovib::cmd_solve(c, a.out);
      std::cout << "E0 = " << rovib::fmt12(s.e0) << " hartree, omega_perp = "
                << rovib::fmt12(rovib::units::hartree_to_wavenumber(s.omega_perp)) << " cm-1, " << s.rows.size()
                << " rows -> " << a.out << "/states.csv\n";
    } else if (converge->parsed()) {
      const auto rows = rovib::cmd_converge(c, a.out);
      std::cout << rows.size() << " truncations -> " << a.out << "/converge.csv\n";
    } else if (calibrate->parsed()) {
      const auto cal = rovib::cmd_calibrate(c, a.out);
      std::cout << "bend_kb = " << rovib::fmt12(cal.kb) << " hartree/rad^2 after " << cal.iterations
                << " iterations -> " << a.out << "/calibrated.ini\n";
    } else if (expand->parsed()) {
      const auto v = rovib::cmd_expand(c, a.out);
      std::cout << v.terms.size() << " terms, reconstruction error " << v.reconstruction_error << " -> " << a.out
                << "/expansion.csv\n";
    }
  } catch (const rovib::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rovib::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const rovib::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const rovib::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const rovib::ExpansionError& e) {
    std::cerr << "expansion failure: " << e.what() << "\n";
    return 3;
  } catch (const rovib::DimensionError& e) {
    std::cerr << "basis too large: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

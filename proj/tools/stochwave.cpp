#include <iostream>

#include "stochwave/cli.hpp"

int main(int argc, char** argv) {
  try {
    const stochwave::RunConfig config = stochwave::parse_config(argc, argv);
    return stochwave::run(config, std::cout, std::cerr);
  } catch (const stochwave::HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const stochwave::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }
}

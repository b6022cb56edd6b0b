#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "ouinv/config.hpp"
#include "ouinv/experiments.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

const char* kUsage =
    "usage: ouinv [--config FILE] (--preset NAME | --Q \"r,..;..\" --B \"r,..;..\")\n"
    "             --experiment NAME --seed N --out PATH\n"
    "             [--alpha-min A] [--alpha-max A] [--t-max T] [--resolution R]\n"
    "             [--A A] [--m M]\n"
    "experiments: verify kernel-eval semigroup-check tube-measure weak-type\n"
    "             enhanced sharpness covering-sim\n"
    "presets:     salogni1d isotropic2d nonnormal2d\n"
    "env:         OUKL_THREADS caps the worker count\n";

} // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* env = std::getenv("OUKL_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
    }
#endif
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> fileContents;

    // peel off --config before the regular flag pass
    std::vector<std::string> rest;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--help" || args[i] == "-h") {
            std::cout << kUsage;
            return 0;
        }
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                std::cerr << "--config requires a path\n";
                return 2;
            }
            std::ifstream is(args[++i]);
            if (!is) {
                std::cerr << "cannot open config file: " << args[i] << "\n";
                return 2;
            }
            std::stringstream ss;
            ss << is.rdbuf();
            fileContents = ss.str();
        } else {
            rest.push_back(args[i]);
        }
    }

    try {
        ouinv::RunConfig cfg = ouinv::parse_config(rest, fileContents);
        return ouinv::run(cfg);
    } catch (const ouinv::UnknownFlag& e) {
        std::cerr << "config error: " << e.what() << "\n" << kUsage;
        return 2;
    } catch (const ouinv::MalformedMatrix& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ouinv::ConflictingOptions& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ouinv::NonSymmetric& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ouinv::NonPositiveDefinite& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ouinv::NonHurwitz& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ouinv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

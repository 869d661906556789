#include "args.hpp"
#include "commands.hpp"

#include <defence/error.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Multi-frame fence removal toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "defence 0.1.0");
    defence::cli::add_detect(app);
    defence::cli::add_train_svm(app);
    defence::cli::add_flow(app);
    defence::cli::add_shift(app);
    defence::cli::add_run(app);
    defence::cli::add_synth(app);
    defence::cli::add_metrics(app);
    defence::cli::add_mask_score(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const defence::cli::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const defence::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

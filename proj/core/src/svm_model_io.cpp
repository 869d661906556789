#include "defence/atomic_file.hpp"
#include "defence/error.hpp"
#include "defence/svm.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

namespace defence {

namespace {

constexpr const char* kMagic = "DEFENCE-SVM v1";

void put(std::ostream& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
}

double parse_double(std::string_view tok, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw InvalidArgument("malformed number '" + std::string(tok) + "' in " + where);
    }
    return v;
}

std::string expect_line(std::istream& in, const std::string& key, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument(path + ": missing '" + key + "' line");
    if (line.rfind(key + " ", 0) != 0) {
        throw InvalidArgument(path + ": expected '" + key + "', got '" + line + "'");
    }
    return line.substr(key.size() + 1);
}

}  // namespace

void save_svm_model(const std::filesystem::path& path, const SvmModel& model) {
    write_text_atomically(path, [&](std::ostream& out) {
        out << kMagic << '\n';
        out << "gamma ";
        put(out, model.gamma);
        out << "\nbias ";
        put(out, model.bias);
        out << "\nwindow " << model.config.window_width << ' ' << model.config.window_height << '\n';
        out << "nsv " << model.support_vectors.size() << '\n';
        for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
            put(out, model.dual_coefs[i]);
            for (double v : model.support_vectors[i].values) {
                out << ' ';
                put(out, v);
            }
            out << '\n';
        }
    });
}

SvmModel load_svm_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file " + path.string());
    const std::string where = path.string();
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw InvalidArgument(where + ": not a DEFENCE-SVM v1 model");
    }
    SvmModel model;
    model.gamma = parse_double(expect_line(in, "gamma", where), where);
    model.bias = parse_double(expect_line(in, "bias", where), where);
    {
        std::istringstream ws(expect_line(in, "window", where));
        if (!(ws >> model.config.window_width >> model.config.window_height)) {
            throw InvalidArgument(where + ": malformed window line");
        }
        model.config.validate();
    }
    std::size_t nsv = 0;
    {
        std::istringstream ns(expect_line(in, "nsv", where));
        if (!(ns >> nsv)) throw InvalidArgument(where + ": malformed nsv line");
    }
    if (!(model.gamma > 0.0)) throw InvalidArgument(where + ": gamma must be positive");
    const std::size_t len = model.config.descriptor_length();
    for (std::size_t i = 0; i < nsv; ++i) {
        if (!std::getline(in, line)) throw InvalidArgument(where + ": truncated support vector list");
        std::string_view rest(line);
        std::vector<double> values;
        values.reserve(len + 1);
        while (!rest.empty()) {
            const auto sp = rest.find(' ');
            const auto tok = rest.substr(0, sp);
            if (!tok.empty()) values.push_back(parse_double(tok, where));
            if (sp == std::string_view::npos) break;
            rest.remove_prefix(sp + 1);
        }
        if (values.size() != len + 1) {
            throw InvalidArgument(where + ": support vector " + std::to_string(i) + " has " +
                                  std::to_string(values.size() ? values.size() - 1 : 0) +
                                  " values, expected " + std::to_string(len));
        }
        model.dual_coefs.push_back(values.front());
        model.support_vectors.push_back(HogDescriptor{{values.begin() + 1, values.end()}});
    }
    return model;
}

}  // namespace defence

#include "tamperkit/config.hpp"

#include "tamperkit/errors.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>

namespace tamperkit {

namespace {

std::string trim(const std::string& s) {
    const size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string strip_quotes(std::string v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        return v.substr(1, v.size() - 2);
    }
    return v;
}

double to_double(const std::string& file, size_t line, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::logic_error&) {
        throw SchemaError(file, line, "expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& file, size_t line, const std::string& v) {
    try {
        size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::logic_error&) {
        throw SchemaError(file, line, "expected an integer, got '" + v + "'");
    }
}

} // namespace

void Config::validate() const {
    if (filter_threshold < 0.0 || filter_threshold > 1.0) {
        throw SchemaError("filter_threshold must be in [0,1]");
    }
    if (classify_max_edit < 0) throw SchemaError("classify_max_edit must be >= 0");
    if (!(iou_threshold > 0.0) || iou_threshold > 1.0) {
        throw SchemaError("iou_threshold must be in (0,1]");
    }
    if (!(solver_tol > 0.0)) throw SchemaError("solver_tol must be positive");
    if (solver_max_iters < 0) throw SchemaError("solver_max_iters must be >= 0");
    if (max_retries < 0) throw SchemaError("max_retries must be >= 0");
    if (concurrency < 1) throw SchemaError("concurrency must be >= 1");
    if (temperature < 0.0) throw SchemaError("temperature must be >= 0");
    if (!word_vectors.empty() && !std::filesystem::exists(word_vectors)) {
        throw SchemaError("word_vectors file " + word_vectors + " does not exist");
    }
    if (!stopwords.empty() && !std::filesystem::exists(stopwords)) {
        throw SchemaError("stopwords file " + stopwords + " does not exist");
    }
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string() + ": " + std::strerror(errno));

    Config cfg;
    const std::string file = path.string();
    std::string section;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw SchemaError(file, line_no, "unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "annotator" && section != "scoring" && section != "solver") {
                throw SchemaError(file, line_no, "unknown section [" + section + "]");
            }
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw SchemaError(file, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = strip_quotes(trim(line.substr(eq + 1)));

        if (section == "annotator") {
            if (key == "endpoint") cfg.endpoint = value;
            else if (key == "model_id") cfg.model_id = value;
            else if (key == "api_key_env") cfg.api_key_env = value;
            else if (key == "temperature") cfg.temperature = to_double(file, line_no, value);
            else if (key == "max_retries") cfg.max_retries = to_int(file, line_no, value);
            else if (key == "concurrency") cfg.concurrency = to_int(file, line_no, value);
            else if (key == "fixtures_dir") cfg.fixtures_dir = value;
            else throw SchemaError(file, line_no, "unknown key '" + key + "' in [annotator]");
        } else if (section == "scoring") {
            if (key == "word_vectors") cfg.word_vectors = value;
            else if (key == "stopwords") cfg.stopwords = value;
            else if (key == "filter_threshold")
                cfg.filter_threshold = to_double(file, line_no, value);
            else if (key == "classify_max_edit")
                cfg.classify_max_edit = to_int(file, line_no, value);
            else if (key == "iou_threshold") cfg.iou_threshold = to_double(file, line_no, value);
            else throw SchemaError(file, line_no, "unknown key '" + key + "' in [scoring]");
        } else if (section == "solver") {
            if (key == "tolerance") cfg.solver_tol = to_double(file, line_no, value);
            else if (key == "max_iters") cfg.solver_max_iters = to_int(file, line_no, value);
            else throw SchemaError(file, line_no, "unknown key '" + key + "' in [solver]");
        } else {
            throw SchemaError(file, line_no, "key outside any section");
        }
    }
    cfg.validate();
    return cfg;
}

} // namespace tamperkit

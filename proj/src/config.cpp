#include "boxlab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "boxlab/error.hpp"

namespace boxlab {

UncertaintyParams PipelineConfig::uncertainty_params() const {
  UncertaintyParams p;
  p.sigma_vis = sigma_vis;
  p.sigma_occ = sigma_occ;
  p.conf_floor = conf_floor;
  p.edge_margin_frac = edge_margin_frac;
  return p;
}

RefineOptions PipelineConfig::refine_options() const {
  RefineOptions opts;
  opts.lambda = lambda;
  opts.xtol = xtol;
  opts.ftol = ftol;
  opts.max_iterations = max_refine_iterations;
  opts.degenerate_area_frac = degenerate_area_frac;
  return opts;
}

namespace {

struct TomlValue {
  enum class Kind { number, boolean, string, array } kind = Kind::number;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<double> array;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& message) {
  throw Error(ErrorCode::parse_error,
              origin + ":" + std::to_string(line) + ": " + message);
}

TomlValue parse_value(const std::string& raw, const std::string& origin,
                      int line) {
  TomlValue value;
  const std::string token = trim(raw);
  if (token.empty()) fail(origin, line, "missing value");
  if (token.front() == '"') {
    if (token.size() < 2 || token.back() != '"') {
      fail(origin, line, "unterminated string");
    }
    value.kind = TomlValue::Kind::string;
    value.text = token.substr(1, token.size() - 2);
    return value;
  }
  if (token == "true" || token == "false") {
    value.kind = TomlValue::Kind::boolean;
    value.boolean = token == "true";
    return value;
  }
  if (token.front() == '[') {
    if (token.back() != ']') fail(origin, line, "unterminated array");
    value.kind = TomlValue::Kind::array;
    std::stringstream elems(token.substr(1, token.size() - 2));
    std::string elem;
    while (std::getline(elems, elem, ',')) {
      elem = trim(elem);
      if (elem.empty()) continue;
      try {
        value.array.push_back(std::stod(elem));
      } catch (const std::exception&) {
        fail(origin, line, "array element '" + elem + "' is not a number");
      }
    }
    return value;
  }
  try {
    std::size_t used = 0;
    value.number = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
  } catch (const std::exception&) {
    fail(origin, line, "value '" + token + "' is not a number");
  }
  return value;
}

double expect_number(const TomlValue& v, const std::string& key,
                     const std::string& origin, int line) {
  if (v.kind != TomlValue::Kind::number) {
    fail(origin, line, "key '" + key + "' expects a number");
  }
  return v.number;
}

// "a:b" or "a->b" pair syntax for axis policy entries.
AxisPolicy::Pair parse_pair(const std::string& text, const std::string& origin,
                            int line) {
  auto split_at = text.find("->");
  std::size_t skip = 2;
  if (split_at == std::string::npos) {
    split_at = text.find(':');
    skip = 1;
  }
  if (split_at == std::string::npos) {
    fail(origin, line, "axis pair '" + text + "' needs 'from:to'");
  }
  return {trim(text.substr(0, split_at)), trim(text.substr(split_at + skip))};
}

std::vector<std::string> parse_string_array(const std::string& raw,
                                            const std::string& origin,
                                            int line) {
  const std::string token = trim(raw);
  if (token.size() < 2 || token.front() != '[' || token.back() != ']') {
    fail(origin, line, "expected an array of strings");
  }
  std::vector<std::string> out;
  std::stringstream elems(token.substr(1, token.size() - 2));
  std::string elem;
  while (std::getline(elems, elem, ',')) {
    elem = trim(elem);
    if (elem.empty()) continue;
    if (elem.size() < 2 || elem.front() != '"' || elem.back() != '"') {
      fail(origin, line, "array element '" + elem + "' is not a string");
    }
    out.push_back(elem.substr(1, elem.size() - 2));
  }
  return out;
}

}  // namespace

PipelineConfig parse_config(const std::string& text,
                            const std::string& origin) {
  PipelineConfig config;
  std::istringstream stream(text);
  std::string raw_line;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    const auto comment = raw_line.find('#');
    std::string line =
        trim(comment == std::string::npos ? raw_line
                                          : raw_line.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "ransac" && section != "sweep" &&
          section != "axis_policy") {
        fail(origin, line_no, "unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw_value = line.substr(eq + 1);

    if (section == "axis_policy") {
      if (key == "x_pairs" || key == "y_pairs") {
        auto& pairs = key == "x_pairs" ? config.axis_policy.x_pairs
                                       : config.axis_policy.y_pairs;
        pairs.clear();
        for (const auto& entry :
             parse_string_array(raw_value, origin, line_no)) {
          pairs.push_back(parse_pair(entry, origin, line_no));
        }
      } else if (key == "min_confidence") {
        config.axis_policy.min_confidence = expect_number(
            parse_value(raw_value, origin, line_no), key, origin, line_no);
      } else {
        fail(origin, line_no, "unknown axis_policy key '" + key + "'");
      }
      continue;
    }

    const TomlValue value = parse_value(raw_value, origin, line_no);
    if (section == "ransac") {
      if (key == "threshold_px") {
        config.ransac.threshold_px = expect_number(value, key, origin, line_no);
      } else if (key == "confidence") {
        config.ransac.confidence = expect_number(value, key, origin, line_no);
      } else if (key == "max_iters") {
        config.ransac.max_iters =
            static_cast<int>(expect_number(value, key, origin, line_no));
      } else {
        fail(origin, line_no, "unknown ransac key '" + key + "'");
      }
    } else if (section == "sweep") {
      if (key == "sigmas") {
        if (value.kind != TomlValue::Kind::array || value.array.empty()) {
          fail(origin, line_no, "sweep.sigmas expects a non-empty array");
        }
        config.sweep.sigmas = value.array;
      } else if (key == "trials") {
        config.sweep.trials_per_sigma =
            static_cast<int>(expect_number(value, key, origin, line_no));
      } else if (key == "seed") {
        config.sweep.seed = static_cast<std::uint64_t>(
            expect_number(value, key, origin, line_no));
      } else {
        fail(origin, line_no, "unknown sweep key '" + key + "'");
      }
    } else {
      if (key == "lambda") {
        config.lambda = expect_number(value, key, origin, line_no);
      } else if (key == "epsilon") {
        config.epsilon = expect_number(value, key, origin, line_no);
      } else if (key == "xtol") {
        config.xtol = expect_number(value, key, origin, line_no);
      } else if (key == "ftol") {
        config.ftol = expect_number(value, key, origin, line_no);
      } else if (key == "sigma_vis") {
        config.sigma_vis = expect_number(value, key, origin, line_no);
      } else if (key == "sigma_occ") {
        config.sigma_occ = expect_number(value, key, origin, line_no);
      } else if (key == "conf_floor") {
        config.conf_floor = expect_number(value, key, origin, line_no);
      } else if (key == "edge_margin_frac") {
        config.edge_margin_frac = expect_number(value, key, origin, line_no);
      } else if (key == "degenerate_area_frac") {
        config.degenerate_area_frac =
            expect_number(value, key, origin, line_no);
      } else if (key == "max_refine_iterations") {
        config.max_refine_iterations =
            static_cast<int>(expect_number(value, key, origin, line_no));
      } else {
        fail(origin, line_no, "unknown key '" + key + "'");
      }
    }
  }

  if (config.lambda < 0.0 || config.lambda > 1.0) {
    throw Error(ErrorCode::validation_error, "lambda must be in [0, 1]");
  }
  if (config.epsilon < 0.0) {
    throw Error(ErrorCode::validation_error, "epsilon must be >= 0");
  }
  for (double s : config.sweep.sigmas) {
    if (s <= 0.0) {
      throw Error(ErrorCode::validation_error, "sweep sigmas must be > 0");
    }
  }
  if (config.sweep.trials_per_sigma < 1) {
    throw Error(ErrorCode::validation_error, "sweep trials must be >= 1");
  }
  return config;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open config file " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace boxlab

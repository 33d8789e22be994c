#include "loewner/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace loewner::io {
namespace {

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  return j.get<double>();
}

const Json& member(const Json& j, const char* key, const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + " must be a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string(what) + " lacks \"" + key + "\"");
  return *it;
}

std::pair<double, double> pair_of(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw InputError(std::string(what) + " must be [a, b] pairs");
  return {number(j[0], what), number(j[1], what)};
}

template <class F>
auto rethrow_as_input(F f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

void dump_to(std::string& out, const Json& j, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += pretty ? ": " : ":";
        dump_to(out, value, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += pretty && flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_to(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const SampledDriving& u) {
  Json samples = Json::array();
  for (std::size_t i = 0; i < u.size(); ++i) samples.push_back({u.times()[i], u.values()[i]});
  return Json{{"interp", std::string(to_string(u.interp()))}, {"samples", std::move(samples)}};
}

Json to_json(const SlitPolyline& slit) {
  Json vertices = Json::array();
  for (const Point& p : slit.vertices) vertices.push_back({p.real(), p.imag()});
  return Json{{"vertices", std::move(vertices)}};
}

Json to_json(const std::vector<SlitPolyline>& slits) {
  Json list = Json::array();
  for (const auto& s : slits) list.push_back(to_json(s));
  return Json{{"slits", std::move(list)}};
}

Json to_json(const MultiSlitSystem& system) {
  Json lambdas = Json::array();
  if (system.constant_weights()) {
    for (double l : system.constant_lambdas()) lambdas.push_back(l);
  } else {
    for (const auto& l : *system.lambda_functions()) lambdas.push_back(to_json(l));
  }
  Json drivings = Json::array();
  for (const auto& u : system.drivings()) drivings.push_back(to_json(u));
  return Json{{"lambdas", std::move(lambdas)}, {"drivings", std::move(drivings)}};
}

SampledDriving driving_from_json(const Json& j) {
  const Json& samples = member(j, "samples", "driving");
  if (!samples.is_array()) throw InputError("driving samples must be an array");
  std::vector<double> t, u;
  for (const auto& s : samples) {
    const auto [a, b] = pair_of(s, "driving samples");
    t.push_back(a);
    u.push_back(b);
  }
  std::string interp = "Linear";
  if (const auto it = j.find("interp"); it != j.end()) {
    if (!it->is_string()) throw InputError("driving interp must be a string");
    interp = it->get<std::string>();
  }
  return rethrow_as_input([&] { return SampledDriving(t, u, parse_interp(interp)); });
}

SlitPolyline slit_from_json(const Json& j) {
  const Json& vertices = member(j, "vertices", "slit");
  if (!vertices.is_array()) throw InputError("slit vertices must be an array");
  SlitPolyline slit;
  for (const auto& v : vertices) {
    const auto [x, y] = pair_of(v, "slit vertices");
    slit.vertices.emplace_back(x, y);
  }
  rethrow_as_input([&] {
    validate_slit(slit);
    return 0;
  });
  return slit;
}

std::vector<SlitPolyline> slits_from_json(const Json& j) {
  const Json& list = j.is_array() ? j : member(j, "slits", "slit list");
  if (!list.is_array()) throw InputError("slits must be an array");
  std::vector<SlitPolyline> out;
  for (const auto& s : list) out.push_back(slit_from_json(s));
  return out;
}

MultiSlitSystem system_from_json(const Json& j) {
  const Json& lambdas = member(j, "lambdas", "system");
  const Json& drivings = member(j, "drivings", "system");
  if (!lambdas.is_array() || !drivings.is_array()) throw InputError("system lambdas and drivings must be arrays");
  std::vector<SampledDriving> u;
  for (const auto& d : drivings) u.push_back(driving_from_json(d));
  const bool constant = std::all_of(lambdas.begin(), lambdas.end(), [](const Json& l) { return l.is_number(); });
  return rethrow_as_input([&] {
    if (constant) {
      std::vector<double> l;
      for (const auto& x : lambdas) l.push_back(x.get<double>());
      return MultiSlitSystem(std::move(l), std::move(u));
    }
    std::vector<SampledDriving> l;
    for (const auto& x : lambdas) l.push_back(driving_from_json(x));
    return MultiSlitSystem(std::move(l), std::move(u));
  });
}

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_to(out, j, indent, 0);
  out += '\n';
  return out;
}

Json parse(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(origin + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json(const std::string& path) { return parse(read_file(path), path); }

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path);
    out << contents;
    if (!out.flush()) throw InputError("cannot write " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot write " + path);
  }
}

std::string trace_csv(const TraceResult& trace) {
  const bool multi = trace.curves.size() > 1;
  std::string out = multi ? "t,re,im,slit_index\n" : "t,re,im\n";
  for (std::size_t k = 0; k < trace.curves.size(); ++k) {
    const auto& c = trace.curves[k];
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      out += format_number(c.times[i]) + ',' + format_number(c.points[i].real()) + ',' +
             format_number(c.points[i].imag());
      if (multi) out += ',' + std::to_string(k);
      out += '\n';
    }
  }
  return out;
}

std::string curves_svg(const std::vector<std::vector<Point>>& curves, const SvgOptions& options) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = 0.0;
  for (const auto& c : curves) {
    for (const Point& p : c) {
      if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) continue;
      x0 = std::min(x0, p.real());
      x1 = std::max(x1, p.real());
      y1 = std::max(y1, p.imag());
    }
  }
  if (!std::isfinite(x0)) {
    x0 = -1.0;
    x1 = 1.0;
  }
  if (y1 <= 0.0) y1 = 1.0;
  const double pad = options.padding * std::max(x1 - x0, y1);
  x0 -= pad;
  x1 += pad;
  const double y0 = -pad;
  y1 += pad;
  const double scale = std::min(options.width / (x1 - x0), options.height / (y1 - y0));
  auto px = [&](Point p) {
    return format_number((p.real() - x0) * scale) + ',' + format_number((y1 - p.imag()) * scale);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << format_number((x1 - x0) * scale) << ' '
      << format_number((y1 - y0) * scale) << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <line x1=\"0\" y1=\"" << format_number(y1 * scale) << "\" x2=\""
      << format_number((x1 - x0) * scale) << "\" y2=\"" << format_number(y1 * scale)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    if (c.empty()) continue;
    const char* color = colors[k % 6];
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << px(c[i]);
    out << "\"/>\n";
    const Point b = c.front();
    out << "  <circle cx=\"" << format_number((b.real() - x0) * scale) << "\" cy=\""
        << format_number((y1 - b.imag()) * scale) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace loewner::io

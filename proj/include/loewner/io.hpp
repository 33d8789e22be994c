#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "loewner/driving.hpp"
#include "loewner/slit.hpp"
#include "loewner/trace.hpp"

namespace loewner::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Schemas:
//   driving  {"interp": "Linear", "samples": [[t, u], ...]}
//   slit     {"vertices": [[x, y], ...]}
//   slits    {"slits": [slit, ...]}  or a bare array of slits
//   system   {"lambdas": [number | driving, ...], "drivings": [driving, ...]}
// Readers throw InputError on anything malformed.

Json to_json(const SampledDriving& u);
Json to_json(const SlitPolyline& slit);
Json to_json(const std::vector<SlitPolyline>& slits);
Json to_json(const MultiSlitSystem& system);

SampledDriving driving_from_json(const Json& j);
SlitPolyline slit_from_json(const Json& j);
std::vector<SlitPolyline> slits_from_json(const Json& j);
MultiSlitSystem system_from_json(const Json& j);

/// Compact or indented JSON text; every number is printed with %.17g and
/// non-finite numbers become null. Ends with a newline.
std::string dump(const Json& j, int indent = 2);

/// %.17g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double x);

Json parse(const std::string& text, const std::string& origin = "input");
std::string read_file(const std::string& path);
Json read_json(const std::string& path);

/// Writes to a temporary file next to `path` and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

/// CSV with header t,re,im for one curve, t,re,im,slit_index for several.
std::string trace_csv(const TraceResult& trace);

struct SvgOptions {
  int width = 800;
  int height = 600;
  /// Extra room around the data, as a fraction of its extent.
  double padding = 0.08;
};

/// The real axis, each curve as a polyline and a marker at each base point.
std::string curves_svg(const std::vector<std::vector<Point>>& curves, const SvgOptions& options = {});

}  // namespace loewner::io

#include <json.hpp>

#include "agglo/errors.hpp"
#include "agglo/linkage.hpp"

namespace agglo {

std::string dendrogram_to_json(const Dendrogram& d) {
  nlohmann::json merges = nlohmann::json::array();
  for (const Merge& m : d.merges()) merges.push_back({m.left, m.right, m.height, m.size});
  nlohmann::json doc{{"n", d.point_count()}, {"merges", std::move(merges)}};
  return doc.dump();
}

Dendrogram dendrogram_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("dendrogram JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("merges")) {
    throw ValidationError("dendrogram JSON needs an object with \"n\" and \"merges\"");
  }
  std::vector<Merge> merges;
  try {
    const auto n = doc.at("n").get<std::size_t>();
    for (const auto& q : doc.at("merges")) {
      if (!q.is_array() || q.size() != 4) {
        throw ValidationError("dendrogram JSON: each merge must be [left, right, height, size]");
      }
      merges.push_back({q[0].get<std::size_t>(), q[1].get<std::size_t>(), q[2].get<double>(),
                        q[3].get<std::size_t>()});
    }
    Dendrogram d(n, std::move(merges));
    const auto report = validate_dendrogram(d);
    if (!report.ok()) throw ValidationError("invalid dendrogram: " + report.violations.front().message);
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("dendrogram JSON: ") + e.what());
  }
}

}  // namespace agglo

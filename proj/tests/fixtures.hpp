#pragma once

#include <string>
#include <vector>

#include "ceg/event_tree.hpp"
#include "ceg/prior.hpp"
#include "ceg/rational.hpp"
#include "ceg/serialize.hpp"

namespace ceg::fixture {

inline std::string data_path(const std::string& name) { return std::string(CEG_DATA_DIR) + "/" + name; }

inline EventTree sample_tree() {
  return build_event_tree(ingest(read_record_table_file(data_path("sample_records.csv"))));
}

inline PathCountTable falls_table() {
  auto table = ingest(read_record_table_file(data_path("falls_synthetic.csv")));
  return add_sampling_zeros(std::move(table),
                            paths_from_json(read_json_file(data_path("falls_sampling_zeros.json"))));
}

inline EventTree falls_tree() { return build_event_tree(falls_table()); }

inline Path path(std::initializer_list<const char*> labels) {
  Path p;
  for (const char* l : labels) p.emplace_back(l);
  return p;
}

inline std::vector<NodeIndex> nodes(std::initializer_list<int> ids) {
  return std::vector<NodeIndex>(ids.begin(), ids.end());
}

// The 13 entries of the sample path dictionary.
inline PathCountTable::Map sample_dictionary() {
  const std::string ca = "Community Assessed", cn = "Community Not Assessed";
  return {
      {{ca}, 2},
      {{cn}, 2},
      {{ca, "High Risk"}, 1},
      {{ca, "Low Risk"}, 1},
      {{cn, "High Risk"}, 1},
      {{cn, "Low Risk"}, 1},
      {{ca, "High Risk", "Referred and Treated"}, 1},
      {{ca, "Low Risk", "Don't Fall"}, 1},
      {{cn, "High Risk", "Not Referred and Not Treated"}, 1},
      {{cn, "Low Risk", "Not Referred and Not Treated"}, 1},
      {{ca, "High Risk", "Referred and Treated", "Fall"}, 1},
      {{cn, "High Risk", "Not Referred and Not Treated", "Fall"}, 1},
      {{cn, "Low Risk", "Not Referred and Not Treated", "Fall"}, 1},
  };
}

inline Hyperstage falls_hyperstage() {
  return Hyperstage{{nodes({0}),
                     nodes({1, 2, 3, 4}),
                     nodes({5, 9}),
                     nodes({6, 10}),
                     nodes({7, 8, 11, 12, 13, 14, 15, 16, 17, 22, 23, 24, 25, 26})}};
}

// Default prior for the falls tree with alpha 4, in situation order.
inline std::vector<std::vector<Rational>> falls_prior() {
  auto rep = [](int n, Rational v) { return std::vector<Rational>(n, v); };
  const Rational half(1, 2), sixth(1, 6), quarter(1, 4), twelfth(1, 12), eighth(1, 8);
  return {rep(4, 1),       rep(2, half),    rep(2, half),    rep(2, half),    rep(2, half),
          rep(3, sixth),   rep(2, quarter), rep(2, quarter), rep(2, quarter), rep(3, sixth),
          rep(2, quarter), rep(2, quarter), rep(2, quarter), rep(2, twelfth), rep(2, twelfth),
          rep(2, twelfth), rep(2, eighth),  rep(2, eighth),  rep(2, twelfth), rep(2, twelfth),
          rep(2, twelfth), rep(2, eighth),  rep(2, eighth)};
}

}  // namespace ceg::fixture

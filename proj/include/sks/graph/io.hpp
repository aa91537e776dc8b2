#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sks/graph/multigraph.hpp"

namespace sks::graph {

/// Line-oriented edge list: `ego alter label weight [last_interaction_s]`.
/// '#' starts a comment. UIDs are decimal or 0x-prefixed hex.
SocialMultiGraph read_edge_list(std::istream& in);
SocialMultiGraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const SocialMultiGraph& g);

/// One JSON object per line with the EdgeUpdateRecord fields.
std::vector<EdgeUpdateRecord> read_update_log(std::istream& in);
void write_update_log(std::ostream& out, const std::vector<EdgeUpdateRecord>& records);
std::string to_json_line(const EdgeUpdateRecord& rec);

}  // namespace sks::graph

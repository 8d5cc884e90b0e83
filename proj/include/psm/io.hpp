#pragma once

#include <string>

#include <json.hpp>

#include "psm/reductions.hpp"
#include "psm/typed.hpp"

namespace psm {

// insertion-ordered so emitted files are deterministic and round-trip exactly
using Json = nlohmann::ordered_json;

// All numbers travel as exact rational strings "p/q" (or plain integers).

Json instance_to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Json typed_to_json(const TypedInstance& ti);
TypedInstance typed_from_json(const Json& j);

Json smti_to_json(const SmtiInstance& m);
SmtiInstance smti_from_json(const Json& j);

// Policy files carry a "mode" discriminator plus the realized utility.
Json policy_to_json(const Instance& inst, const PublicPolicy& pol, const Rat& utility);
Json policy_to_json(const Instance& inst, const PrivatePolicy& pol, const Rat& utility);
bool policy_json_is_private(const Json& j);
PublicPolicy public_policy_from_json(const Instance& inst, const Json& j);
PrivatePolicy private_policy_from_json(const Instance& inst, const Json& j);

Json typed_policy_to_json(const TypedInstance& ti, const TypedPolicy& tp);
TypedPolicy typed_policy_from_json(const TypedInstance& ti, const Json& j);

Json load_json_file(const std::string& path);        // InputError on parse failure
void save_json_file(const std::string& path, const Json& j);

}  // namespace psm

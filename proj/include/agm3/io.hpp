#ifndef AGM3_IO_HPP
#define AGM3_IO_HPP

#include <json.hpp>
#include <optional>
#include <string>

#include "agm3/differentials.hpp"
#include "agm3/fixtures.hpp"

namespace agm3 {

using Json = nlohmann::json;

/// 17 significant digits: exact binary64 round trip through decimal strings.
std::string format_double(double v);
double parse_double(const std::string& s);

Json complex_to_json(const Cx& z);
Cx complex_from_json(const Json& j);

Json form_to_json(const HomogeneousForm& f);
HomogeneousForm form_from_json(const Json& j);

Json point_to_json(const ProjPoint& p);
ProjPoint point_from_json(const Json& j);

Json cert_to_json(const RankCertificate& c);
Json tower_report_to_json(const RamificationReport& r);
Json flag_to_json(const FlagSpec& f);       // 1-based indices on the wire
FlagSpec flag_from_json(const Json& j);
FlagSpec parse_flag_spec(const std::string& spec);  // "pair=1,2;partition=3-4,5-6"

/// Parsed input document. Either a quartic plus a 2-torsion choice, or a
/// direct plane configuration; flags/tolerances optional.
struct InputConfig {
    ToleranceProfile profile;
    std::optional<Quartic> quartic;
    std::optional<std::pair<int, int>> alpha_pair;  // 0-based bitangent indices
    std::optional<std::array<HomogeneousForm, 2>> alpha_lines;
    std::optional<FlagSpec> flag;
    std::optional<PlaneConfiguration> direct_config;  // E, Q, q only
};

InputConfig config_from_json(const Json& j);
Json config_to_json(const InputConfig& c);

/// Sanity pass for user-provided direct configurations; throws NonGeneric
/// on broken incidences so synthetic degeneracies exit with code 2.
void validate_configuration(const PlaneConfiguration& config, const ToleranceProfile& profile);

std::uint64_t fnv1a_hash(const std::string& bytes);

InputConfig load_config_file(const std::string& path);

}  // namespace agm3

#endif

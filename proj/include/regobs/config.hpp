#ifndef REGOBS_CONFIG_HPP
#define REGOBS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "regobs/geometry.hpp"

namespace regobs
{
    using Json = nlohmann::json;

    /// Strict view of one JSON object: every key must be read before finish(), and
    /// diagnostics name the full field path.
    class ConfigObject
    {
    public:
        ConfigObject(const Json& j, std::string path);

        const std::string& path() const { return path_; }
        bool has(const std::string& key) const;
        std::string field(const std::string& key) const;

        double number(const std::string& key);
        double number(const std::string& key, double fallback);
        double positive(const std::string& key);
        double positive(const std::string& key, double fallback);
        int integer(const std::string& key);
        int integer(const std::string& key, int fallback);
        bool boolean(const std::string& key, bool fallback);
        std::string string(const std::string& key);
        std::string string(const std::string& key, const std::string& fallback);
        Vec2 point(const std::string& key);
        std::vector<double> numbers(const std::string& key);
        const Json& raw(const std::string& key);
        ConfigObject object(const std::string& key);

        /// Throws Config naming the first key that was never read.
        void finish() const;

    private:
        const Json& get(const std::string& key);

        const Json& j_;
        std::string path_;
        std::set<std::string> used_;
    };

    /// Throws Config with the field path when j is not an object.
    void require_object(const Json& j, const std::string& path);

    Vec2 parse_point(const Json& j, const std::string& path);
    Domain parse_domain(const Json& j, const std::string& path);
    Region parse_region(const Domain& domain, const Json& j, const std::string& path);

    struct ExperimentConfig
    {
        int version = 1;
        std::string description;
        Domain domain = Domain::interval(-1.0, 1.0);
        std::optional<Region> omega;
        /// The set O (support of observed data, or region of prescribed terminal state).
        std::optional<Region> region_O;
        std::optional<Region> gamma;
        std::uint64_t seed = 0;
        /// Command-specific blocks keyed by subcommand name, parsed by the commands.
        Json blocks = Json::object();

        const Region& require_omega() const;
        const Region& require_O() const;
    };

    constexpr int config_version = 1;

    ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
    ExperimentConfig load_config(const std::string& path);
} // namespace regobs

#endif

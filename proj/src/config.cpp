#include "regobs/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "regobs/errors.hpp"

namespace regobs
{
    namespace
    {
        [[noreturn]] void fail(const std::string& path, const std::string& message)
        {
            throw Error(ErrorCode::Config, path + ": " + message);
        }

        double degrees(double d) { return d * pi / 180.0; }

        std::pair<double, double> parse_pair(const Json& j, const std::string& path)
        {
            if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
                fail(path, "expected [lo, hi]");
            return {j[0].get<double>(), j[1].get<double>()};
        }

        const std::vector<std::string> block_names = {"rays", "critical_time", "reachable", "observe", "control"};
    } // namespace

    ConfigObject::ConfigObject(const Json& j, std::string path) : j_(j), path_(std::move(path))
    {
        require_object(j_, path_);
    }

    void require_object(const Json& j, const std::string& path)
    {
        if (!j.is_object())
            fail(path, "expected an object");
    }

    bool ConfigObject::has(const std::string& key) const { return j_.contains(key); }

    std::string ConfigObject::field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const Json& ConfigObject::get(const std::string& key)
    {
        if (!j_.contains(key))
            fail(field(key), "missing");
        used_.insert(key);
        return j_.at(key);
    }

    double ConfigObject::number(const std::string& key)
    {
        const Json& v = get(key);
        if (!v.is_number())
            fail(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            fail(field(key), "expected a finite number");
        return x;
    }

    double ConfigObject::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    double ConfigObject::positive(const std::string& key)
    {
        const double x = number(key);
        if (!(x > 0.0))
            fail(field(key), "must be positive");
        return x;
    }

    double ConfigObject::positive(const std::string& key, double fallback)
    {
        return has(key) ? positive(key) : fallback;
    }

    int ConfigObject::integer(const std::string& key)
    {
        const Json& v = get(key);
        if (!v.is_number_integer())
            fail(field(key), "expected an integer");
        return v.get<int>();
    }

    int ConfigObject::integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

    bool ConfigObject::boolean(const std::string& key, bool fallback)
    {
        if (!has(key))
            return fallback;
        const Json& v = get(key);
        if (!v.is_boolean())
            fail(field(key), "expected true or false");
        return v.get<bool>();
    }

    std::string ConfigObject::string(const std::string& key)
    {
        const Json& v = get(key);
        if (!v.is_string())
            fail(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::string ConfigObject::string(const std::string& key, const std::string& fallback)
    {
        return has(key) ? string(key) : fallback;
    }

    Vec2 ConfigObject::point(const std::string& key) { return parse_point(get(key), field(key)); }

    std::vector<double> ConfigObject::numbers(const std::string& key)
    {
        const Json& v = get(key);
        if (!v.is_array())
            fail(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            if (!v[i].is_number())
                fail(field(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    const Json& ConfigObject::raw(const std::string& key) { return get(key); }

    ConfigObject ConfigObject::object(const std::string& key) { return ConfigObject(get(key), field(key)); }

    void ConfigObject::finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key()))
                fail(field(it.key()), "unknown key");
    }

    Vec2 parse_point(const Json& j, const std::string& path)
    {
        if (j.is_number())
            return Vec2(j.get<double>());
        if (!j.is_array() || j.empty() || j.size() > 2)
            fail(path, "expected a number or an array of one or two numbers");
        for (const auto& c : j)
            if (!c.is_number())
                fail(path, "expected numeric coordinates");
        return j.size() == 1 ? Vec2(j[0].get<double>()) : Vec2(j[0].get<double>(), j[1].get<double>());
    }

    Domain parse_domain(const Json& j, const std::string& path)
    {
        ConfigObject o(j, path);
        const std::string type = o.string("type");
        Domain d = Domain::interval(-1.0, 1.0);
        if (type == "interval")
            d = Domain::interval(o.number("a"), o.number("b"));
        else if (type == "disk")
            d = Domain::disk(o.point("center"), o.positive("radius"));
        else if (type == "rectangle")
            d = Domain::rectangle(o.point("min"), o.point("max"));
        else
            fail(o.field("type"), "unknown domain type '" + type + "'");
        o.finish();
        return d;
    }

    Region parse_region(const Domain& domain, const Json& j, const std::string& path)
    {
        ConfigObject o(j, path);
        const std::string type = o.string("type");
        std::optional<Region> r;
        if (type == "interval_union")
        {
            const Json& parts = o.raw("parts");
            if (!parts.is_array())
                fail(o.field("parts"), "expected an array of [lo, hi] pairs");
            std::vector<std::pair<double, double>> p;
            for (std::size_t i = 0; i < parts.size(); ++i)
                p.push_back(parse_pair(parts[i], o.field("parts") + "[" + std::to_string(i) + "]"));
            r = Region::interval_union(domain, p);
        }
        else if (type == "annulus")
            r = Region::annulus(domain, o.point("center"), o.number("r_inner"), o.positive("r_outer"));
        else if (type == "ball")
            r = Region::ball(domain, o.point("center"), o.positive("radius"));
        else if (type == "angular_sector")
            r = Region::angular_sector(domain, degrees(o.number("angle_min_deg")), degrees(o.number("angle_max_deg")),
                                       o.positive("depth"));
        else if (type == "strip")
        {
            const int axis = o.integer("axis");
            const double threshold = o.number("threshold");
            const std::string side = o.string("side");
            if (side != "below" && side != "above")
                fail(o.field("side"), "expected 'below' or 'above'");
            r = Region::strip(domain, axis, threshold, side == "below" ? Strip::Side::Below : Strip::Side::Above);
        }
        else if (type == "collar")
            r = Region::collar(domain, o.positive("depth"));
        else if (type == "whole")
            r = Region::whole(domain);
        else if (type == "boundary_arc")
            r = Region::boundary_arc(domain, degrees(o.number("angle_min_deg")), degrees(o.number("angle_max_deg")));
        else if (type == "boundary_segments")
        {
            const Json& segs = o.raw("segments");
            if (!segs.is_array())
                fail(o.field("segments"), "expected an array of [p, q] point pairs");
            std::vector<std::pair<Vec2, Vec2>> s;
            for (std::size_t i = 0; i < segs.size(); ++i)
            {
                const std::string p = o.field("segments") + "[" + std::to_string(i) + "]";
                if (!segs[i].is_array() || segs[i].size() != 2)
                    fail(p, "expected [p, q]");
                s.emplace_back(parse_point(segs[i][0], p), parse_point(segs[i][1], p));
            }
            r = Region::boundary_segments(domain, s);
        }
        else
            fail(o.field("type"), "unknown region type '" + type + "'");
        o.finish();
        return *r;
    }

    const Region& ExperimentConfig::require_omega() const
    {
        if (!omega)
            fail("omega", "missing");
        return *omega;
    }

    const Region& ExperimentConfig::require_O() const
    {
        if (!region_O)
            fail("O", "missing");
        return *region_O;
    }

    ExperimentConfig parse_config(const std::string& text, const std::string& source)
    {
        Json j;
        try
        {
            j = Json::parse(text);
        }
        catch (const Json::parse_error& e)
        {
            fail(source, std::string("malformed JSON: ") + e.what());
        }

        ConfigObject o(j, "");
        ExperimentConfig c;
        try
        {
            c.version = o.integer("version");
            if (c.version != config_version)
                fail("version", "unsupported version " + std::to_string(c.version));
            c.description = o.string("description", "");
            c.domain = parse_domain(o.raw("domain"), "domain");
            if (o.has("omega"))
                c.omega = parse_region(c.domain, o.raw("omega"), "omega");
            if (o.has("O"))
                c.region_O = parse_region(c.domain, o.raw("O"), "O");
            if (o.has("gamma"))
                c.gamma = parse_region(c.domain, o.raw("gamma"), "gamma");
            const int seed = o.integer("seed", 0);
            if (seed < 0)
                fail("seed", "must be nonnegative");
            c.seed = static_cast<std::uint64_t>(seed);
            for (const auto& name : block_names)
                if (o.has(name))
                {
                    require_object(o.raw(name), name);
                    c.blocks[name] = j.at(name);
                }
            o.finish();
        }
        catch (const Error& e)
        {
            // geometry validation failures surface as config errors with the source name
            if (e.code() == ErrorCode::Config)
                throw Error(ErrorCode::Config, source + ": " + std::string(e.what()).substr(8));
            throw Error(ErrorCode::Config, source + ": " + e.what());
        }
        return c;
    }

    ExperimentConfig load_config(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::Io, "cannot read " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), path);
    }
} // namespace regobs

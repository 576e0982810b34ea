#include <cstdlib>
#include <sstream>

#include "dxd/errors.hpp"

namespace dxd {

Caps Caps::parse(const std::string& spec) {
    Caps c;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("DXD_CAPS entry without '=': " + item);
        std::string key = item.substr(0, eq);
        std::uint64_t value = 0;
        try {
            value = std::stoull(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw InputError("DXD_CAPS value is not a number: " + item);
        }
        if (key == "vectors")
            c.vectors = value;
        else if (key == "aut")
            c.slot_automata = value;
        else if (key == "kappa")
            c.kappa = value;
        else if (key == "regex")
            c.regex_nodes = value;
        else
            throw InputError("unknown DXD_CAPS key: " + key);
    }
    return c;
}

Caps Caps::from_env() {
    const char* v = std::getenv("DXD_CAPS");
    return v ? parse(v) : Caps{};
}

}  // namespace dxd

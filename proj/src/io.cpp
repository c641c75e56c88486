#include "coalopt/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coalopt/errors.hpp"

namespace coalopt {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char ch : value) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

InjectionSchedule parse_schedule_csv(const std::string& text, int num_wells,
                                     int num_intervals, double interval_years) {
    InjectionSchedule schedule{num_wells, num_intervals, interval_years, {}};
    schedule.rates_mt_yr.reserve(
        static_cast<std::size_t>(num_wells) * num_intervals);
    int data_rows = 0;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        ++data_rows;
        const std::string row = "schedule row " + std::to_string(data_rows);
        if (data_rows > num_wells)
            throw ValidationError(row + ": expected only " +
                                  std::to_string(num_wells) + " well rows");
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream fields(line);
        std::string field;
        int count = 0;
        while (fields >> field) {
            ++count;
            if (count > num_intervals)
                throw ValidationError(row + ": expected " +
                                      std::to_string(num_intervals) + " rates");
            double value = 0.0;
            const auto res =
                std::from_chars(field.data(), field.data() + field.size(), value);
            if (res.ec != std::errc() || res.ptr != field.data() + field.size())
                throw ValidationError(row + ": '" + field + "' is not a number");
            schedule.rates_mt_yr.push_back(value);
        }
        if (count != num_intervals)
            throw ValidationError(row + ": expected " +
                                  std::to_string(num_intervals) + " rates, got " +
                                  std::to_string(count));
    }
    if (data_rows != num_wells)
        throw ValidationError("schedule has " + std::to_string(data_rows) +
                              " well rows, expected " + std::to_string(num_wells));
    schedule.validate(num_wells);
    return schedule;
}

}  // namespace coalopt

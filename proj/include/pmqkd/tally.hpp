#ifndef PMQKD_TALLY_HPP
#define PMQKD_TALLY_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pmqkd {

enum class Intensity : int { vacuum = 0, weak = 1, signal = 2 };

constexpr std::array<Intensity, 3> kAllSettings{Intensity::vacuum, Intensity::weak,
                                                Intensity::signal};

const char* setting_name(Intensity a);
Intensity setting_from_name(std::string_view name);

struct TallyCell {
    std::uint64_t sent = 0;
    std::uint64_t clicked = 0;
    std::uint64_t bit_errors = 0;
    bool operator==(const TallyCell&) const = default;
};

/// Counts per (intensity setting, merged phase group). The sole statistical
/// bridge between the protocol run and the decoy estimator.
class TallyTable {
  public:
    TallyTable() = default;
    explicit TallyTable(int phase_slices);

    int phase_slices() const { return phase_slices_; }
    int groups() const { return phase_slices_ / 2; }

    TallyCell& at(Intensity a, int j);
    const TallyCell& at(Intensity a, int j) const;

    std::uint64_t sent(Intensity a) const;
    std::uint64_t clicked(Intensity a) const;
    std::uint64_t clicked(Intensity a, const std::vector<int>& group_set) const;
    std::uint64_t sent(Intensity a, const std::vector<int>& group_set) const;

    void merge(const TallyTable& other);

    /// 0 <= clicked <= sent and bit_errors <= clicked, everywhere.
    void validate() const;

    /// CSV with header (setting,j_s,sent,clicked,bit_errors); rows ordered by
    /// setting name lexically, then j_s ascending.
    std::string to_csv() const;
    static TallyTable from_csv(std::string_view text);

    bool operator==(const TallyTable&) const = default;

  private:
    int phase_slices_ = 0;
    std::vector<TallyCell> cells_; // 3 * groups, [setting][group]
};

} // namespace pmqkd

#endif

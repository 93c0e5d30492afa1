#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace normalkit {

// Permutation of {0,1,2,3}, stored as the image table.
struct Perm4 {
    std::array<uint8_t, 4> img{0, 1, 2, 3};

    static Perm4 identity() { return Perm4{}; }

    uint8_t operator[](int i) const { return img[static_cast<size_t>(i)]; }

    Perm4 inverse() const {
        Perm4 q;
        for (int i = 0; i < 4; ++i) q.img[img[static_cast<size_t>(i)]] = static_cast<uint8_t>(i);
        return q;
    }

    // (a*b)[i] = a[b[i]]
    Perm4 operator*(const Perm4& b) const {
        Perm4 r;
        for (int i = 0; i < 4; ++i) r.img[static_cast<size_t>(i)] = img[b.img[static_cast<size_t>(i)]];
        return r;
    }

    bool operator==(const Perm4& o) const { return img == o.img; }
    bool operator!=(const Perm4& o) const { return img != o.img; }

    int sign() const {
        int s = 1;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (img[static_cast<size_t>(i)] > img[static_cast<size_t>(j)]) s = -s;
        return s;
    }

    bool is_identity() const { return img == std::array<uint8_t, 4>{0, 1, 2, 3}; }

    std::string str() const {
        std::string s;
        for (int i = 0; i < 4; ++i) s += static_cast<char>('0' + img[static_cast<size_t>(i)]);
        return s;
    }
};

}  // namespace normalkit

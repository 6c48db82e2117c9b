#include "trendguard/simulator.hpp"

namespace trendguard {

const std::vector<std::string>& default_wordlist() {
  static const std::vector<std::string> words = {
    "elma", "armut", "kiraz", "erik", "incir", "ayva", "nar", "dut", "kavun",
    "karpuz", "limon", "portakal", "mandalina", "muz", "ceviz", "badem",
    "fındık", "fıstık", "kestane", "üzüm", "kalem", "kağıt", "defter",
    "silgi", "cetvel", "masa", "sandalye", "dolap", "kapı", "pencere", "duvar",
    "tavan", "zemin", "halı", "perde", "yastık", "yorgan", "battaniye",
    "çarşaf", "ev", "oda", "mutfak", "banyo", "balkon", "bahçe", "çatı",
    "merdiven", "asansör", "koridor", "salon", "bodrum", "garaj", "kümes",
    "ahır", "ambar", "depo", "dükkan", "pazar", "çarşı", "deniz", "göl",
    "nehir", "dere", "çay", "ırmak", "dağ", "tepe", "ova", "vadi", "orman",
    "çöl", "ada", "kıyı", "liman", "körfez", "boğaz", "yayla", "mera",
    "çayır", "güneş", "ay", "yıldız", "bulut", "yağmur", "kar", "dolu",
    "rüzgar", "fırtına", "şimşek", "yıldırım", "sis", "çiy",
    "kırağı", "gökkuşağı", "şafak", "akşam", "gece", "sabah", "öğle",
    "kedi", "köpek", "kuş", "balık", "at", "eşek", "inek", "koyun", "keçi",
    "tavuk", "horoz", "ördek", "kaz", "hindi", "tavşan", "sincap", "kirpi",
    "kurbağa", "kaplumbağa", "yılan", "arı", "karınca", "kelebek", "sinek",
    "böcek", "örümcek", "akrep", "yarasa", "baykuş", "kartal", "şahin",
    "güvercin", "serçe", "karga", "leylek", "martı", "penguen", "fok",
    "balina", "yunus", "ekmek", "peynir", "zeytin", "bal", "reçel",
    "tereyağı", "yumurta", "süt", "yoğurt", "ayran", "çorba", "pilav",
    "makarna", "börek", "simit", "pide", "lahmacun", "kebap", "köfte",
    "dolma", "tuz", "biber", "şeker", "un", "pirinç", "bulgur", "mercimek",
    "nohut", "fasulye", "bezelye", "patates", "soğan", "sarımsak", "domates",
    "salatalık", "havuç", "marul", "ıspanak", "lahana", "pırasa", "okumak",
    "yazmak", "koşmak", "yürümek", "uyumak", "uyanmak", "gülmek",
    "ağlamak", "düşünmek", "anlamak", "konuşmak", "dinlemek", "izlemek",
    "bakmak", "görmek", "duymak", "sevmek", "beklemek", "kaynaştırabilme",
    "siperisaika", "tenkidi", "güzelleştirilme", "oyalayabilme", "kargocu",
    "azımsanma", "aforozlanma", "yemenici", "kalsiyum", "klorür",
    "bağlaşım", "koyulaştırmak", "örgütleme", "karlanmak", "yarım",
    "gün", "yan", "bakış", "panel", "mavi", "kırmızı", "yeşil", "sarı",
    "mor", "turuncu", "pembe", "beyaz", "siyah", "gri", "kahverengi",
    "lacivert", "büyük", "küçük", "uzun", "kısa", "geniş", "dar",
    "derin", "sığ", "yüksek", "alçak", "ağır", "hafif", "sıcak",
    "soğuk", "ılık", "serin", "kuru", "ıslak", "eski", "yeni", "hızlı",
    "yavaş", "güzel", "çirkin", "temiz", "kirli", "zengin", "fakir", "mutlu",
    "üzgün", "yorgun", "dinç", "sessiz", "gürültülü", "tatlı", "acı",
    "ekşi", "tuzlu", "bir", "iki", "üç", "dört", "beş", "altı", "yedi",
    "sekiz", "dokuz", "on", "yüz", "bin", "kitap", "gazete", "dergi", "mektup",
    "zarf", "pul", "kart", "harita", "pusula", "saat", "takvim", "ajanda",
    "not", "liste", "araba", "otobüs", "tren", "uçak", "gemi", "vapur",
    "bisiklet", "motor", "kamyon", "taksi", "tramvay", "metro", "doktor",
    "öğretmen", "mühendis", "avukat", "aşçı", "terzi", "berber", "kasap",
    "fırıncı", "çiftçi", "çoban", "balıkçı", "marangoz", "demirci",
    "bakkal", "manav", "şarkı", "türkü", "ezgi", "nota", "davul", "zurna",
    "bağlama", "keman", "piyano", "gitar", "flüt", "toprak", "taş", "kum",
    "çamur", "kaya", "mermer", "demir", "bakır", "altın", "gümüş",
    "kurşun", "çinko", "kömür", "aforoz", "boyama", "yıkanma", "taranma",
    "sarılma", "açılma", "kapanma", "dolanma", "savrulma", "ezilme",
    "büzülme", "apple", "river", "mountain", "cloud", "pencil", "window",
    "garden", "silver", "copper", "thunder", "whisper", "lantern", "meadow",
    "harbor", "candle", "marble", "velvet", "pepper", "ginger", "cotton",
    "saddle", "kettle", "ladder", "ribbon", "button", "puzzle", "compass",
    "anchor", "orbit", "comet", "planet", "galaxy", "nebula", "crater",
    "meteor", "asteroid", "eclipse", "horizon", "tiger", "zebra", "camel",
    "donkey", "rabbit", "beaver", "otter", "falcon", "sparrow", "pigeon",
    "parrot", "lizard", "turtle", "dolphin", "bread", "cheese", "butter",
    "honey", "pickle", "noodle", "muffin", "waffle", "biscuit", "pretzel",
    "cycle", "serendipity", "trigonometry", "algebra", "geometry", "calculus",
    "grammar", "syntax", "lexicon", "quietly", "rapidly", "gently", "softly",
    "boldly", "run", "walk", "jump", "swim", "climb", "dance", "sing", "read",
    "write", "paint", "build", "carry", "throw", "catch", "bottle", "basket",
    "bucket", "blanket", "pillow", "curtain", "carpet", "mirror", "shelf",
    "drawer", "ocean", "valley", "desert", "forest", "island", "canyon",
    "glacier", "volcano", "prairie", "swamp", "sabun", "havlu", "tarak",
    "fırça", "kova", "süpürge", "paspas", "makas", "iğne", "iplik",
    "düğme", "fermuar", "cep", "yaka", "kol", "etek", "gömlek", "ceket",
    "pantolon", "çorap", "ayakkabı", "şapka", "eldiven", "atkı", "kemer",
    "çanta", "cüzdan", "anahtar", "kilit", "zil", "kasırga", "çığ", "sel",
    "deprem",
  };
  return words;
}

}  // namespace trendguard

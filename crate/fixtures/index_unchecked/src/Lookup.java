public class Lookup {
    native int find(byte[] key);

    void query(byte[] key) {
        find(key);
    }
}

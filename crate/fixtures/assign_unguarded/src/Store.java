public class Store {
    native void put(byte[] blob);

    void save(byte[] blob) {
        put(blob);
    }
}
